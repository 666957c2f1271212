//! Perturbs several users' series, aggregates them at the collector and
//! prints how much noise survives in each window.
//!
//! cargo run -p cldp --example cooperative_cancellation

use cldp::{aggregate, perturb_all, synth_series, CldpConfig, NoiseMode, Signal, SynthSpec};

fn main() -> cldp::Result<()> {
    let users = synth_series(&SynthSpec {
        num_users: 8,
        samples_per_user: 600,
        signal: Signal::Sinusoid {
            level: 1.2,
            amplitude: 0.6,
            period: 144.0,
        },
        seed: 1,
    })?;

    for mode in [NoiseMode::Shuffle, NoiseMode::Toss] {
        let cfg = CldpConfig::builder(8, 20, 120, 3.0)
            .mode(mode)
            .seed(9)
            .build()?;
        let perturbed = perturb_all(&users, &cfg)?;
        let mut report = aggregate(&perturbed, cfg.num_users())?;
        report.attach_truth(&users)?;

        println!("{mode} mode ({cfg})");
        for (w, r) in report.residual_noise_per_window.iter().enumerate() {
            let own: f64 = perturbed[0].noise_used[w].values.iter().sum();
            println!("  window {w}: user 1 noise total {own:+9.3}   collector residual {r:+.3e}");
        }
        println!();
    }
    Ok(())
}
