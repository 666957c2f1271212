//! Command-line harness: perturb, aggregate, sweep and privacy reports.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cldp::data::{load_power_csv, DEFAULT_COLUMN};
use cldp::harness::{
    run_pipeline, run_sweep, summarize, write_aggregate_csv, write_perturbed_csv,
    write_privacy_csv, write_summary_csv, write_sweep_csv, DataSource, SweepParam, SweepSpec,
};
use cldp::noise::CldpConfigBuilder;
use cldp::{CldpConfig, NoiseMode, PrivacyReport, Signal};

#[derive(Parser)]
#[command(
    name = "cldp",
    version,
    about = "Cooperative LDP time-series simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Perturb every user's series and write original vs perturbed samples.
    Perturb {
        #[command(flatten)]
        mech: MechArgs,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Perturb, aggregate at the collector and write per-window residuals.
    Aggregate {
        #[command(flatten)]
        mech: MechArgs,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep one of k, l, u, A and tabulate MSE and aggregate error.
    Sweep {
        #[command(flatten)]
        mech: MechArgs,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long = "sweep", value_name = "k|l|u|A")]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 30)]
        reps: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Epsilon proxy constant.
        #[arg(long = "proxy-c", default_value_t = 1.0)]
        proxy_c: f64,
        /// Record wall time per point (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Print the epsilon proxy and break probability for a parameter set.
    Privacy {
        #[arg(long, default_value_t = 40)]
        tossing: usize,
        #[arg(long, default_value_t = 200)]
        window: usize,
        #[arg(long, default_value_t = 4)]
        users: usize,
        #[arg(long, default_value_t = 3.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Shuffle,
    Toss,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthArg {
    Constant,
    Sinusoid,
    RandomWalk,
}

#[derive(Args)]
struct MechArgs {
    #[arg(long, default_value_t = 4)]
    users: usize,
    #[arg(long, default_value_t = 40)]
    tossing: usize,
    #[arg(long, default_value_t = 200)]
    window: usize,
    #[arg(long, default_value_t = 3.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    period: f64,
    #[arg(long, value_enum, default_value = "shuffle")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    randomize_assignment: bool,
}

impl MechArgs {
    fn config(&self) -> cldp::Result<CldpConfig> {
        self.builder().build()
    }

    fn builder(&self) -> CldpConfigBuilder {
        CldpConfig::builder(self.users, self.tossing, self.window, self.amplitude)
            .period(self.period)
            .mode(match self.mode {
                ModeArg::Shuffle => NoiseMode::Shuffle,
                ModeArg::Toss => NoiseMode::Toss,
            })
            .seed(self.seed)
            .randomize_assignment(self.randomize_assignment)
    }
}

#[derive(Args)]
struct DataArgs {
    /// Household power file (semicolon-separated, `?` for missing).
    #[arg(long, conflicts_with = "synth")]
    input: Option<PathBuf>,
    #[arg(long, default_value = DEFAULT_COLUMN)]
    column: String,
    /// First value of the loaded column to use.
    #[arg(long, default_value_t = 0)]
    offset: usize,
    /// Number of values to use from `--offset`.
    #[arg(long)]
    length: Option<usize>,
    /// Synthetic base signal (default when no input is given: random-walk).
    #[arg(long, value_enum)]
    synth: Option<SynthArg>,
    /// Samples per synthetic user.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1.0)]
    level: f64,
    #[arg(long, default_value_t = 0.5)]
    signal_amplitude: f64,
    /// Sinusoid period in samples.
    #[arg(long, default_value_t = 60.0)]
    signal_period: f64,
    #[arg(long, default_value_t = 0.05)]
    step_std: f64,
}

impl DataArgs {
    fn source(&self) -> Result<DataSource> {
        if let Some(path) = &self.input {
            let data = load_power_csv(path, &self.column)
                .with_context(|| format!("loading {}", path.display()))?;
            if data.rows_skipped > 0 {
                eprintln!(
                    "note: skipped {} rows with missing values",
                    data.rows_skipped
                );
            }
            return Ok(DataSource::Dataset(data.slice(self.offset, self.length)?));
        }
        let signal = match self.synth.unwrap_or(SynthArg::RandomWalk) {
            SynthArg::Constant => Signal::Constant { level: self.level },
            SynthArg::Sinusoid => Signal::Sinusoid {
                level: self.level,
                amplitude: self.signal_amplitude,
                period: self.signal_period,
            },
            SynthArg::RandomWalk => Signal::RandomWalk {
                level: self.level,
                step_std: self.step_std,
            },
        };
        Ok(DataSource::Synth {
            signal,
            samples_per_user: self.samples,
        })
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn perturb_like(
    mech: &MechArgs,
    data: &DataArgs,
) -> Result<(Vec<cldp::UserSeries>, cldp::harness::PipelineRun)> {
    let cfg = mech.config()?;
    let (users, unassigned) = data.source()?.users(cfg.num_users(), cfg.master_seed())?;
    if unassigned > 0 {
        eprintln!("note: {unassigned} samples did not divide evenly across users and were dropped");
    }
    let run = run_pipeline(&cfg, &users)?;
    if run.report.dropped_samples > 0 {
        eprintln!(
            "warning: {} trailing samples did not fill a window and were dropped",
            run.report.dropped_samples
        );
    }
    Ok((users, run))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Perturb { mech, data, out } => {
            let (users, run) = perturb_like(&mech, &data)?;
            write_perturbed_csv(&users, &run.perturbed, create(&out)?)?;
            for (p, m) in run.perturbed.iter().zip(&run.mse_per_user) {
                println!(
                    "user {}: windows={} mse={}",
                    p.user_index,
                    p.window_count(),
                    m
                );
            }
            println!("mean per-sample mse={}", run.mse_per_sample);
        }
        Command::Aggregate { mech, data, out } => {
            let (_, run) = perturb_like(&mech, &data)?;
            write_aggregate_csv(&run, create(&out)?)?;
            let worst = run
                .report
                .residual_noise_per_window
                .iter()
                .fold(0.0f64, |m, r| m.max(r.abs()));
            println!("windows={}", run.report.window_count());
            println!("aggregate error={}", run.aggregate_error);
            println!("max |residual|={worst}");
        }
        Command::Sweep {
            mech,
            data,
            param,
            values,
            reps,
            out,
            summary,
            proxy_c,
            timing,
        } => {
            let param: SweepParam = param.parse()?;
            // the swept flag's own value is irrelevant; seed the base with
            // the first point so it validates
            let first = *values.first().context("--values is empty")?;
            let base = param.apply(mech.builder(), first)?.build()?;
            let spec = SweepSpec {
                param,
                values,
                base,
                reps,
                data: data.source()?,
                proxy_constant: proxy_c,
                timing,
            };
            let rows = run_sweep(&spec)?;
            write_sweep_csv(&rows, create(&out)?)?;
            let table = summarize(&rows);
            if let Some(path) = summary {
                write_summary_csv(&table, create(&path)?)?;
            }
            for r in &table {
                println!(
                    "{}={}: mse={} (sd {}) aggerr={} (sd {})",
                    r.param, r.value, r.mse_mean, r.mse_std, r.aggerr_mean, r.aggerr_std
                );
            }
        }
        Command::Privacy {
            tossing,
            window,
            users,
            amplitude,
            c,
            out,
        } => {
            let report = PrivacyReport::compute(tossing, window, users, amplitude, c)?;
            if report.no_tossing_entropy() {
                eprintln!("warning: no tossing entropy (k = 1), every toss is predictable");
            }
            println!("k={tossing} l={window} u={users} A={amplitude} c={c}");
            println!("epsilon_proxy={}", report.epsilon_proxy);
            println!("log10_pbreak={}", report.break_probability.log10);
            match report.break_probability.linear {
                Some(p) => println!("pbreak={p:e}"),
                None => println!("pbreak=underflow"),
            }
            if let Some(path) = out {
                write_privacy_csv(&report, create(&path)?)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
