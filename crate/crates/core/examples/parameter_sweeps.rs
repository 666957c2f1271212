//! Runs the four parameter sweeps (tossing space, window size, users and
//! amplitude) on synthetic random-walk data and prints mean/std tables.
//!
//! cargo run --release -p cldp --example parameter_sweeps -- [reps]

use cldp::harness::{run_sweep, summarize, DataSource, SweepParam, SweepSpec};
use cldp::{CldpConfig, NoiseMode, Signal};

fn main() -> cldp::Result<()> {
    let reps = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(30);
    let data = DataSource::Synth {
        signal: Signal::RandomWalk {
            level: 1.0,
            step_std: 0.05,
        },
        samples_per_user: 4000,
    };
    let sweeps = [
        (
            SweepParam::TossingSpace,
            vec![2.0, 5.0, 10.0, 20.0, 40.0],
            NoiseMode::Shuffle,
        ),
        (
            SweepParam::WindowSize,
            vec![40.0, 80.0, 200.0, 400.0],
            NoiseMode::Toss,
        ),
        (
            SweepParam::NumUsers,
            vec![4.0, 8.0, 12.0, 16.0],
            NoiseMode::Toss,
        ),
        (
            SweepParam::Amplitude,
            vec![3.0, 3.25, 3.5, 4.0],
            NoiseMode::Shuffle,
        ),
    ];
    for (param, values, mode) in sweeps {
        let spec = SweepSpec {
            param,
            values,
            base: CldpConfig::builder(4, 40, 200, 3.0).mode(mode).build()?,
            reps,
            data: data.clone(),
            proxy_constant: 1.0,
            timing: true,
        };
        println!("sweep over {param} ({mode}, {reps} seeds per point)");
        println!(
            "  {:>6}  {:>12}  {:>10}  {:>12}  {:>10}",
            param, "mse", "sd", "agg. error", "sd"
        );
        for row in summarize(&run_sweep(&spec)?) {
            println!(
                "  {:>6}  {:>12.6}  {:>10.2e}  {:>12.4e}  {:>10.2e}",
                row.value, row.mse_mean, row.mse_std, row.aggerr_mean, row.aggerr_std
            );
        }
        println!();
    }
    Ok(())
}
