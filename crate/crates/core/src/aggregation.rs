//! Collector-side aggregation of perturbed series.
//!
//! The collector only sees perturbed samples. Residuals against the true
//! aggregate are attached afterwards by whoever holds ground truth (tests and
//! the experiment harness).

use crate::error::{Error, Result};
use crate::perturbation::{PerturbedSeries, UserSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateReport {
    pub num_users: usize,
    pub window_size: usize,
    /// Sum across users at each sample index.
    pub per_timestamp_sum: Vec<f64>,
    /// `per_timestamp_sum / u`.
    pub per_timestamp_mean: Vec<f64>,
    /// Sum of `per_timestamp_sum` over each window.
    pub per_window_total: Vec<f64>,
    /// Noisy minus true window total. Empty until truth is attached.
    pub residual_noise_per_window: Vec<f64>,
    /// Trailing samples dropped across all users before aggregation.
    pub dropped_samples: usize,
}

impl AggregateReport {
    pub fn window_count(&self) -> usize {
        self.per_window_total.len()
    }

    /// Fills `residual_noise_per_window` from the users' original series.
    pub fn attach_truth(&mut self, originals: &[UserSeries]) -> Result<()> {
        let truth = true_window_totals(originals, self.window_size)?;
        self.residual_noise_per_window = residual(&truth, &self.per_window_total)?;
        Ok(())
    }

    /// Mean of the noisy window totals, per window, divided by `l`: the
    /// collector's estimate of the summed per-sample level in each window.
    pub fn per_window_level(&self) -> Vec<f64> {
        let l = self.window_size as f64;
        self.per_window_total.iter().map(|t| t / l).collect()
    }
}

struct Sums {
    per_timestamp: Vec<f64>,
    per_window: Vec<f64>,
}

fn sum_across(series: &[&[f64]], window_size: usize) -> Result<Sums> {
    let first = series.first().ok_or(Error::EmptyInput)?;
    let len = first.len();
    if let Some(bad) = series.iter().find(|s| s.len() != len) {
        return Err(Error::ShapeMismatch(format!(
            "series lengths differ: {} vs {}",
            len,
            bad.len()
        )));
    }
    if window_size == 0 || len % window_size != 0 {
        return Err(Error::ShapeMismatch(format!(
            "length {len} is not a whole number of windows of {window_size}"
        )));
    }
    let mut per_timestamp = vec![0.0; len];
    for s in series {
        for (acc, x) in per_timestamp.iter_mut().zip(s.iter()) {
            *acc += x;
        }
    }
    let per_window = per_timestamp
        .chunks_exact(window_size)
        .map(|w| w.iter().sum())
        .collect();
    Ok(Sums {
        per_timestamp,
        per_window,
    })
}

/// Aggregates exactly `num_users` perturbed series.
pub fn aggregate(perturbed: &[PerturbedSeries], num_users: usize) -> Result<AggregateReport> {
    if perturbed.len() != num_users {
        return Err(Error::UserCountMismatch {
            expected: num_users,
            actual: perturbed.len(),
        });
    }
    let window_size = perturbed.first().ok_or(Error::EmptyInput)?.window_size;
    if let Some(bad) = perturbed.iter().find(|p| p.window_size != window_size) {
        return Err(Error::ShapeMismatch(format!(
            "window sizes differ: {} vs {}",
            window_size, bad.window_size
        )));
    }
    let slices: Vec<&[f64]> = perturbed.iter().map(|p| p.samples.as_slice()).collect();
    let sums = sum_across(&slices, window_size)?;
    let u = num_users as f64;
    Ok(AggregateReport {
        num_users,
        window_size,
        per_timestamp_mean: sums.per_timestamp.iter().map(|s| s / u).collect(),
        per_timestamp_sum: sums.per_timestamp,
        per_window_total: sums.per_window,
        residual_noise_per_window: Vec::new(),
        dropped_samples: perturbed.iter().map(|p| p.dropped).sum(),
    })
}

/// Window totals of the unperturbed data, over complete windows only.
pub fn true_window_totals(originals: &[UserSeries], window_size: usize) -> Result<Vec<f64>> {
    if window_size == 0 {
        return Err(Error::Domain("window size must be positive".into()));
    }
    let slices: Vec<&[f64]> = originals.iter().map(|s| s.windowed(window_size)).collect();
    Ok(sum_across(&slices, window_size)?.per_window)
}

/// `noisy − truth`, element-wise.
pub fn residual(truth: &[f64], noisy: &[f64]) -> Result<Vec<f64>> {
    if truth.len() != noisy.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: noisy.len(),
        });
    }
    Ok(truth.iter().zip(noisy).map(|(t, n)| n - t).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{CldpConfig, NoiseMode};
    use crate::perturbation::perturb_all;

    fn zeros(u: usize, n: usize) -> Vec<UserSeries> {
        (1..=u).map(|i| UserSeries::new(i, vec![0.0; n])).collect()
    }

    #[test]
    fn zero_data_zero_noise_aggregates_to_zero() {
        // u = 2, k = 1: both grid points sit on sine zeros
        let cfg = CldpConfig::new(2, 1, 4, 1.0).unwrap();
        let data = zeros(2, 12);
        let p = perturb_all(&data, &cfg).unwrap();
        let mut r = aggregate(&p, 2).unwrap();
        r.attach_truth(&data).unwrap();
        assert!(r.per_timestamp_sum.iter().all(|x| *x == 0.0));
        assert!(r.per_window_total.iter().all(|x| *x == 0.0));
        assert!(r.residual_noise_per_window.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn shuffle_window_totals_cancel() {
        let cfg = CldpConfig::builder(8, 5, 20, 3.0).seed(11).build().unwrap();
        let data: Vec<UserSeries> = (1..=8)
            .map(|i| UserSeries::new(i, (0..100).map(|t| (t * i) as f64 * 0.01).collect()))
            .collect();
        let p = perturb_all(&data, &cfg).unwrap();
        let mut r = aggregate(&p, 8).unwrap();
        r.attach_truth(&data).unwrap();
        // brute-force sum of every noise value in each window
        for (w, res) in r.residual_noise_per_window.iter().enumerate() {
            let brute: f64 = p
                .iter()
                .map(|s| s.noise_used[w].values.iter().sum::<f64>())
                .sum();
            assert!(brute.abs() < 1e-9 * 3.0 * 8.0 * 20.0);
            assert!(res.abs() < 1e-9 * 3.0 * 8.0 * 20.0, "window {w}: {res}");
        }
    }

    #[test]
    fn report_invariants() {
        let cfg = CldpConfig::builder(4, 3, 7, 1.0)
            .mode(NoiseMode::Toss)
            .seed(2)
            .build()
            .unwrap();
        let data: Vec<UserSeries> = (1..=4)
            .map(|i| UserSeries::new(i, (0..30).map(|t| (t + i) as f64).collect()))
            .collect();
        let p = perturb_all(&data, &cfg).unwrap();
        let r = aggregate(&p, 4).unwrap();
        assert_eq!(r.dropped_samples, 4 * 2);
        assert_eq!(r.window_count(), 4);
        for (w, total) in r.per_window_total.iter().enumerate() {
            let s: f64 = r.per_timestamp_sum[w * 7..(w + 1) * 7].iter().sum();
            assert_eq!(*total, s);
        }
        for (m, s) in r.per_timestamp_mean.iter().zip(&r.per_timestamp_sum) {
            assert_eq!(*m, s / 4.0);
        }
    }

    #[test]
    fn shape_errors() {
        let cfg = CldpConfig::new(2, 1, 2, 1.0).unwrap();
        let mut p = perturb_all(&zeros(2, 4), &cfg).unwrap();
        assert!(matches!(
            aggregate(&p, 4),
            Err(Error::UserCountMismatch { .. })
        ));
        p[1].samples.truncate(2);
        assert!(matches!(aggregate(&p, 2), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn residual_examples() {
        assert_eq!(residual(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(residual(&[1.0, 2.0], &[1.5, 1.5]).unwrap(), vec![0.5, -0.5]);
        assert!(matches!(
            residual(&[1.0], &[]),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
