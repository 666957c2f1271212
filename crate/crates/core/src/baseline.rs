//! Laplace value-perturbation baseline.
//!
//! Each sample gets independent `Lap(0, b)` noise with `b = sensitivity/ε`,
//! drawn by inverse CDF from a seeded uniform stream:
//!
//! ```text
//! F⁻¹(p) = −b · sgn(p − ½) · ln(1 − 2|p − ½|),   p ~ U(0, 1)
//! ```

use rand::distr::Open01;
use rand::Rng;

use crate::error::{Error, Result};
use crate::noise::NoiseVector;
use crate::perturbation::{PerturbedSeries, UserSeries};
use crate::rng::{self, TAG_LAPLACE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceConfig {
    pub epsilon: f64,
    pub sensitivity: f64,
    pub seed: u64,
}

impl LaplaceConfig {
    pub fn new(epsilon: f64, sensitivity: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            epsilon,
            sensitivity,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Domain(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.sensitivity.is_finite() && self.sensitivity > 0.0) {
            return Err(Error::Domain(format!(
                "sensitivity must be positive, got {}",
                self.sensitivity
            )));
        }
        Ok(())
    }

    /// `b = sensitivity / ε`.
    pub fn scale(&self) -> f64 {
        self.sensitivity / self.epsilon
    }
}

/// Inverse-CDF transform of a uniform `p ∈ (0, 1)` into `Lap(0, b)`.
pub fn laplace_inverse_cdf(p: f64, b: f64) -> f64 {
    let centered = p - 0.5;
    -b * centered.signum() * (1.0 - 2.0 * centered.abs()).ln()
}

/// `n` Laplace draws from the stream for `(seed, stream_id)`.
pub fn laplace_noise(n: usize, cfg: &LaplaceConfig, stream_id: u64) -> Result<Vec<f64>> {
    cfg.validate()?;
    let b = cfg.scale();
    let mut rng = rng::stream(cfg.seed, &[TAG_LAPLACE, stream_id]);
    Ok((0..n)
        .map(|_| laplace_inverse_cdf(rng.sample(Open01), b))
        .collect())
}

/// Adds independent Laplace noise to every sample. The whole series is one
/// window, so the result carries a single noise vector.
pub fn laplace_perturb(series: &UserSeries, cfg: &LaplaceConfig) -> Result<PerturbedSeries> {
    let noise = laplace_noise(series.len(), cfg, series.user_index as u64)?;
    let samples = series
        .samples
        .iter()
        .zip(&noise)
        .map(|(x, n)| x + n)
        .collect();
    Ok(PerturbedSeries {
        user_index: series.user_index,
        window_size: series.len(),
        samples,
        noise_used: vec![NoiseVector {
            user_index: series.user_index,
            partition: 0,
            window_index: 0,
            values: noise,
        }],
        dropped: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(LaplaceConfig::new(0.0, 1.0, 0).is_err());
        assert!(LaplaceConfig::new(-1.0, 1.0, 0).is_err());
        assert!(LaplaceConfig::new(f64::NAN, 1.0, 0).is_err());
        assert!(LaplaceConfig::new(1.0, 0.0, 0).is_err());
        assert!(LaplaceConfig::new(1.0, 1.0, 0).is_ok());
    }

    #[test]
    fn inverse_cdf_is_odd_and_zero_at_median() {
        assert_eq!(laplace_inverse_cdf(0.5, 2.0), 0.0);
        let hi = laplace_inverse_cdf(0.9, 1.0);
        let lo = laplace_inverse_cdf(0.1, 1.0);
        assert!((hi + lo).abs() < 1e-12);
        // P(X > x) = ½·e^(−x/b)  ⇒  F⁻¹(0.9) = b·ln 5
        assert!((hi - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn vanishing_scale_leaves_series() {
        let cfg = LaplaceConfig::new(1e13, 1.0, 3).unwrap();
        assert!(cfg.scale() <= 1e-12);
        let s = UserSeries::new(1, (0..1000).map(|x| x as f64 * 0.37).collect());
        let p = laplace_perturb(&s, &cfg).unwrap();
        for (a, b) in s.samples.iter().zip(&p.samples) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = LaplaceConfig::new(0.5, 2.0, 17).unwrap();
        let s = UserSeries::new(2, vec![1.0; 64]);
        assert_eq!(
            laplace_perturb(&s, &cfg).unwrap(),
            laplace_perturb(&s, &cfg).unwrap()
        );
        let other = LaplaceConfig { seed: 18, ..cfg };
        assert_ne!(
            laplace_perturb(&s, &cfg).unwrap(),
            laplace_perturb(&s, &other).unwrap()
        );
    }

    #[test]
    fn empirical_moments() {
        let cfg = LaplaceConfig::new(1.0, 1.0, 2026).unwrap();
        let n = 100_000;
        let noise = laplace_noise(n, &cfg, 1).unwrap();
        let mean = noise.iter().sum::<f64>() / n as f64;
        let var = noise.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 2.0).abs() < 0.1, "var {var}");
    }
}
