//! Experiment harness: end-to-end pipeline runs, parameter sweeps and the
//! CSV tables the command-line tool writes.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::aggregation::{aggregate, true_window_totals, AggregateReport};
use crate::data::{format_float, split_users, synth_series, RawDataset, Signal, SynthSpec};
use crate::error::{Error, Result};
use crate::metrics::{aggregate_error, break_probability, epsilon_proxy, mse};
use crate::noise::{CldpConfig, CldpConfigBuilder};
use crate::perturbation::{perturb_all, PerturbedSeries, UserSeries};

pub const PERTURB_HEADER: [&str; 4] = ["user", "sample_index", "original", "perturbed"];
pub const AGGREGATE_HEADER: [&str; 4] = ["window", "true_total", "noisy_total", "residual"];
pub const SWEEP_HEADER: [&str; 8] = [
    "swept_param",
    "swept_value",
    "seed",
    "mse_per_sample",
    "aggregate_error",
    "epsilon_proxy",
    "log10_pbreak",
    "wall_ms",
];
pub const SUMMARY_HEADER: [&str; 6] = [
    "swept_param",
    "swept_value",
    "mse_mean",
    "mse_std",
    "aggerr_mean",
    "aggerr_std",
];
pub const PRIVACY_HEADER: [&str; 8] = [
    "k",
    "l",
    "u",
    "amplitude",
    "c",
    "epsilon_proxy",
    "log10_pbreak",
    "pbreak",
];

/// Where user series come from.
#[derive(Debug, Clone)]
pub enum DataSource {
    /// A loaded column, split contiguously across users.
    Dataset(RawDataset),
    /// Fresh synthetic users, seeded per run.
    Synth {
        signal: Signal,
        samples_per_user: usize,
    },
}

impl DataSource {
    /// `u` user series for a run seeded with `seed`, plus the number of
    /// source samples that could not be assigned to a user.
    pub fn users(&self, u: usize, seed: u64) -> Result<(Vec<UserSeries>, usize)> {
        match self {
            DataSource::Dataset(data) => {
                let split = split_users(data, u)?;
                Ok((split.users, split.dropped))
            }
            DataSource::Synth {
                signal,
                samples_per_user,
            } => {
                let spec = SynthSpec {
                    num_users: u,
                    samples_per_user: *samples_per_user,
                    signal: *signal,
                    seed,
                };
                Ok((synth_series(&spec)?, 0))
            }
        }
    }
}

/// Everything one perturb-and-aggregate run produces.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub perturbed: Vec<PerturbedSeries>,
    /// Residuals are attached.
    pub report: AggregateReport,
    pub true_totals: Vec<f64>,
    pub mse_per_user: Vec<f64>,
    /// Mean of `mse_per_user`.
    pub mse_per_sample: f64,
    pub aggregate_error: f64,
}

/// Perturbs every user, aggregates at the collector, then scores the result
/// against the originals.
pub fn run_pipeline(cfg: &CldpConfig, users: &[UserSeries]) -> Result<PipelineRun> {
    let l = cfg.window_size();
    let perturbed = perturb_all(users, cfg)?;
    if perturbed.iter().any(|p| p.samples.is_empty()) {
        return Err(Error::Domain(format!(
            "a user series is shorter than one window of {l} samples"
        )));
    }
    let mut report = aggregate(&perturbed, cfg.num_users())?;
    report.attach_truth(users)?;
    let true_totals = true_window_totals(users, l)?;

    let mse_per_user = users
        .iter()
        .zip(&perturbed)
        .map(|(orig, pert)| mse(orig.windowed(l), &pert.samples))
        .collect::<Result<Vec<_>>>()?;
    let mse_per_sample = mse_per_user.iter().sum::<f64>() / mse_per_user.len() as f64;
    let aggregate_error = aggregate_error(&report, &true_totals)?;
    Ok(PipelineRun {
        perturbed,
        report,
        true_totals,
        mse_per_user,
        mse_per_sample,
        aggregate_error,
    })
}

/// The parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    TossingSpace,
    WindowSize,
    NumUsers,
    Amplitude,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::TossingSpace => "k",
            SweepParam::WindowSize => "l",
            SweepParam::NumUsers => "u",
            SweepParam::Amplitude => "A",
        })
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k" => Ok(SweepParam::TossingSpace),
            "l" => Ok(SweepParam::WindowSize),
            "u" => Ok(SweepParam::NumUsers),
            "A" | "a" => Ok(SweepParam::Amplitude),
            other => Err(Error::Config(format!(
                "unknown sweep parameter `{other}` (expected k, l, u or A)"
            ))),
        }
    }
}

fn as_count(param: SweepParam, value: f64) -> Result<usize> {
    if value.is_finite() && value >= 1.0 && value.fract() == 0.0 {
        Ok(value as usize)
    } else {
        Err(Error::Config(format!(
            "{param} must be a positive integer, got {value}"
        )))
    }
}

impl SweepParam {
    /// Sets this parameter on a builder.
    pub fn apply(self, b: CldpConfigBuilder, value: f64) -> Result<CldpConfigBuilder> {
        Ok(match self {
            SweepParam::TossingSpace => b.tossing_space(as_count(self, value)?),
            SweepParam::WindowSize => b.window_size(as_count(self, value)?),
            SweepParam::NumUsers => b.num_users(as_count(self, value)?),
            SweepParam::Amplitude => b.amplitude(value),
        })
    }
}

/// `base` with `param` set to `value` and the master seed replaced.
pub fn point_config(
    base: &CldpConfig,
    param: SweepParam,
    value: f64,
    seed: u64,
) -> Result<CldpConfig> {
    param.apply(base.to_builder().seed(seed), value)?.build()
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    /// Supplies every parameter that is not swept. Its seed is the seed of
    /// the first repetition; repetition `r` uses `seed + r`.
    pub base: CldpConfig,
    pub reps: usize,
    pub data: DataSource,
    /// Constant `c` of the epsilon proxy.
    pub proxy_constant: f64,
    /// Record wall time per point. Off by default so output is reproducible.
    pub timing: bool,
}

impl SweepSpec {
    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.reps as u64).map(|r| self.base.master_seed().wrapping_add(r))
    }

    /// Swept values in output order.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Checks every point before any work starts.
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        for &v in &self.values {
            point_config(&self.base, self.param, v, self.base.master_seed())
                .map_err(|e| Error::Config(format!("sweep point {}={}: {}", self.param, v, e)))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: f64,
    pub seed: u64,
    pub mse_per_sample: f64,
    pub aggregate_error: f64,
    pub epsilon_proxy: f64,
    pub log10_pbreak: f64,
    pub wall_ms: f64,
}

fn run_point(spec: &SweepSpec, value: f64, seed: u64) -> Result<SweepRow> {
    let started = Instant::now();
    let cfg = point_config(&spec.base, spec.param, value, seed)?;
    let (users, _) = spec.data.users(cfg.num_users(), seed)?;
    let run = run_pipeline(&cfg, &users)?;
    let (k, l, u) = (cfg.tossing_space(), cfg.window_size(), cfg.num_users());
    Ok(SweepRow {
        param: spec.param,
        value,
        seed,
        mse_per_sample: run.mse_per_sample,
        aggregate_error: run.aggregate_error,
        epsilon_proxy: epsilon_proxy(k, l, u, cfg.amplitude(), spec.proxy_constant)?,
        log10_pbreak: break_probability(k, l, u)?.log10,
        wall_ms: if spec.timing {
            started.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        },
    })
}

/// Runs every (value, seed) point in parallel. Rows come back sorted by
/// swept value, then seed.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let jobs: Vec<(f64, u64)> = spec
        .sorted_values()
        .into_iter()
        .flat_map(|v| spec.seeds().map(move |s| (v, s)))
        .collect();
    jobs.par_iter()
        .map(|&(v, s)| {
            run_point(spec, v, s).map_err(|e| {
                Error::Config(format!(
                    "sweep point {}={} seed={}: {}",
                    spec.param, v, s, e
                ))
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub param: SweepParam,
    pub value: f64,
    pub mse_mean: f64,
    pub mse_std: f64,
    pub aggerr_mean: f64,
    pub aggerr_std: f64,
}

/// Sample mean and standard deviation (`n − 1` denominator; 0 for one value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One row per distinct swept value, in first-appearance order.
pub fn summarize(rows: &[SweepRow]) -> Vec<SummaryRow> {
    let mut out: Vec<SummaryRow> = Vec::new();
    let mut seen: Vec<f64> = Vec::new();
    for row in rows {
        if seen.iter().any(|v| v.to_bits() == row.value.to_bits()) {
            continue;
        }
        seen.push(row.value);
        let group: Vec<&SweepRow> = rows
            .iter()
            .filter(|r| r.value.to_bits() == row.value.to_bits())
            .collect();
        let mses: Vec<f64> = group.iter().map(|r| r.mse_per_sample).collect();
        let errs: Vec<f64> = group.iter().map(|r| r.aggregate_error).collect();
        let (mse_mean, mse_std) = mean_std(&mses);
        let (aggerr_mean, aggerr_std) = mean_std(&errs);
        out.push(SummaryRow {
            param: row.param,
            value: row.value,
            mse_mean,
            mse_std,
            aggerr_mean,
            aggerr_std,
        });
    }
    out
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.param.to_string(),
            format_float(r.value),
            r.seed.to_string(),
            format_float(r.mse_per_sample),
            format_float(r.aggregate_error),
            format_float(r.epsilon_proxy),
            format_float(r.log10_pbreak),
            format!("{:.3}", r.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.param.to_string(),
            format_float(r.value),
            format_float(r.mse_mean),
            format_float(r.mse_std),
            format_float(r.aggerr_mean),
            format_float(r.aggerr_std),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Original next to perturbed value for every transmitted sample.
pub fn write_perturbed_csv<W: Write>(
    originals: &[UserSeries],
    perturbed: &[PerturbedSeries],
    out: W,
) -> Result<()> {
    if originals.len() != perturbed.len() {
        return Err(Error::UserCountMismatch {
            expected: originals.len(),
            actual: perturbed.len(),
        });
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PERTURB_HEADER)?;
    for (orig, pert) in originals.iter().zip(perturbed) {
        for (j, (x, y)) in orig.samples.iter().zip(&pert.samples).enumerate() {
            w.write_record([
                pert.user_index.to_string(),
                j.to_string(),
                format_float(*x),
                format_float(*y),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(run: &PipelineRun, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_HEADER)?;
    let report = &run.report;
    for (idx, ((t, n), r)) in run
        .true_totals
        .iter()
        .zip(&report.per_window_total)
        .zip(&report.residual_noise_per_window)
        .enumerate()
    {
        w.write_record([
            idx.to_string(),
            format_float(*t),
            format_float(*n),
            format_float(*r),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_privacy_csv<W: Write>(report: &crate::metrics::PrivacyReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PRIVACY_HEADER)?;
    w.write_record([
        report.tossing_space.to_string(),
        report.window_size.to_string(),
        report.num_users.to_string(),
        format_float(report.amplitude),
        format_float(report.proxy_constant),
        format_float(report.epsilon_proxy),
        format_float(report.break_probability.log10),
        report
            .break_probability
            .linear
            .map(format_float)
            .unwrap_or_default(),
    ])?;
    w.flush()?;
    Ok(())
}
