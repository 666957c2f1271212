//! Utility and privacy measures.

use crate::aggregation::AggregateReport;
use crate::error::{Error, Result};

/// Smallest linear break probability that is reported as a plain number.
pub const LINEAR_FLOOR: f64 = 1e-300;

/// Mean of squared element-wise differences.
pub fn mse(original: &[f64], perturbed: &[f64]) -> Result<f64> {
    if original.len() != perturbed.len() {
        return Err(Error::LengthMismatch {
            left: original.len(),
            right: perturbed.len(),
        });
    }
    if original.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sse: f64 = original
        .iter()
        .zip(perturbed)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sse / original.len() as f64)
}

/// Adversary's chance of guessing every toss, `(1/k)^(l·u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakProbability {
    /// `−l·u·log10(k)`.
    pub log10: f64,
    /// The linear probability, or `None` when it falls below [`LINEAR_FLOOR`].
    pub linear: Option<f64>,
}

impl BreakProbability {
    pub fn underflows(&self) -> bool {
        self.linear.is_none()
    }
}

fn positive_count(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::Domain(format!("{name} must be positive")))
    } else {
        Ok(())
    }
}

fn positive_real(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

/// Computed in log space; `(1/k)^(l·u)` overflows any float for modest
/// parameters.
pub fn break_probability(k: usize, l: usize, u: usize) -> Result<BreakProbability> {
    positive_count("tossing space k", k)?;
    positive_count("window size l", l)?;
    positive_count("number of users u", u)?;
    let tosses = l as f64 * u as f64;
    // log10 of an exact power of ten is exact, which keeps k = 10 clean
    let log10 = if k == 1 {
        0.0
    } else {
        -(tosses * (k as f64).log10())
    };
    let linear = if k == 1 {
        Some(1.0)
    } else if log10 >= LINEAR_FLOOR.log10() {
        Some(10f64.powf(log10))
    } else {
        None
    };
    Ok(BreakProbability { log10, linear })
}

/// Proportional privacy-budget proxy `c·(l·u)/(A·k)`.
pub fn epsilon_proxy(k: usize, l: usize, u: usize, amplitude: f64, c: f64) -> Result<f64> {
    positive_count("tossing space k", k)?;
    positive_count("window size l", l)?;
    positive_count("number of users u", u)?;
    positive_real("amplitude", amplitude)?;
    positive_real("proxy constant c", c)?;
    Ok(c * (l as f64 * u as f64) / (amplitude * k as f64))
}

/// Privacy figures for one parameter set, with the parameters echoed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyReport {
    pub tossing_space: usize,
    pub window_size: usize,
    pub num_users: usize,
    pub amplitude: f64,
    pub proxy_constant: f64,
    pub epsilon_proxy: f64,
    pub break_probability: BreakProbability,
}

impl PrivacyReport {
    pub fn compute(k: usize, l: usize, u: usize, amplitude: f64, c: f64) -> Result<Self> {
        Ok(Self {
            tossing_space: k,
            window_size: l,
            num_users: u,
            amplitude,
            proxy_constant: c,
            epsilon_proxy: epsilon_proxy(k, l, u, amplitude, c)?,
            break_probability: break_probability(k, l, u)?,
        })
    }

    /// True when the tossing space has a single point and hides nothing.
    pub fn no_tossing_entropy(&self) -> bool {
        self.tossing_space == 1
    }
}

/// Squared error of the collector's per-window level estimate: each window's
/// residual total is divided by `l` (so the figure is in per-sample units of
/// the summed signal), squared, and averaged over windows. `truth` holds the
/// true window totals.
pub fn aggregate_error(report: &AggregateReport, truth: &[f64]) -> Result<f64> {
    if truth.len() != report.per_window_total.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} true window totals for {} windows",
            truth.len(),
            report.per_window_total.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    let l = report.window_size as f64;
    let truth_level: Vec<f64> = truth.iter().map(|t| t / l).collect();
    mse(&truth_level, &report.per_window_level())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(mse(&[0.0, 0.0], &[1.0, -1.0]).unwrap(), 1.0);
    }

    #[test]
    fn mse_errors() {
        assert!(matches!(mse(&[], &[]), Err(Error::EmptyInput)));
        assert!(matches!(
            mse(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn break_probability_examples() {
        let p = break_probability(10, 5, 3).unwrap();
        assert_eq!(p.log10, -15.0);
        assert!((p.linear.unwrap() - 1e-15).abs() < 1e-27);

        let p = break_probability(1, 17, 9).unwrap();
        assert_eq!((p.log10, p.linear), (0.0, Some(1.0)));

        let p = break_probability(2, 1, 1).unwrap();
        assert_eq!(p.linear, Some(0.5));
    }

    #[test]
    fn break_probability_underflow_is_flagged() {
        let p = break_probability(40, 200, 16).unwrap();
        assert!(p.underflows());
        assert!((p.log10 + 3200.0 * 40f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn break_probability_domain() {
        assert!(matches!(break_probability(0, 1, 1), Err(Error::Domain(_))));
        assert!(break_probability(2, 0, 1).is_err());
        assert!(break_probability(2, 1, 0).is_err());
    }

    #[test]
    fn epsilon_proxy_examples() {
        assert_eq!(epsilon_proxy(1, 1, 1, 1.0, 1.0).unwrap(), 1.0);
        let base = epsilon_proxy(3, 7, 4, 1.5, 1.0).unwrap();
        assert_eq!(epsilon_proxy(3, 7, 4, 3.0, 1.0).unwrap(), base / 2.0);
        assert_eq!(epsilon_proxy(6, 7, 4, 1.5, 1.0).unwrap(), base / 2.0);
        let e = epsilon_proxy(40, 200, 4, 3.0, 1.0).unwrap();
        assert!((e - 800.0 / 120.0).abs() < 1e-12);
        let e = epsilon_proxy(10, 5, 3, 3.0, 1.0).unwrap();
        assert!((e - 0.5).abs() < 1e-15);
    }

    #[test]
    fn epsilon_proxy_domain() {
        assert!(epsilon_proxy(0, 1, 1, 1.0, 1.0).is_err());
        assert!(epsilon_proxy(1, 1, 1, 0.0, 1.0).is_err());
        assert!(epsilon_proxy(1, 1, 1, 1.0, -2.0).is_err());
    }

    #[test]
    fn privacy_report_flags_single_point_space() {
        let r = PrivacyReport::compute(1, 5, 3, 3.0, 1.0).unwrap();
        assert!(r.no_tossing_entropy());
        assert_eq!(r.break_probability.linear, Some(1.0));
    }
}
