//! Applying window noise to a user's series.

use crate::error::{Error, Result};
use crate::noise::{draw_noise, tossing_grid, CldpConfig, NoiseVector, PartitionMap};

/// One user's raw series.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSeries {
    /// 1-based.
    pub user_index: usize,
    pub samples: Vec<f64>,
}

impl UserSeries {
    pub fn new(user_index: usize, samples: Vec<f64>) -> Self {
        Self {
            user_index,
            samples,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Complete, non-overlapping windows of length `l`.
    pub fn windows(&self, l: usize) -> std::slice::ChunksExact<'_, f64> {
        self.samples.chunks_exact(l)
    }

    pub fn window_count(&self, l: usize) -> usize {
        self.samples.len() / l
    }

    /// Samples left over after the last complete window.
    pub fn trailing_len(&self, l: usize) -> usize {
        self.samples.len() % l
    }

    /// The samples covered by complete windows.
    pub fn windowed(&self, l: usize) -> &[f64] {
        &self.samples[..self.window_count(l) * l]
    }
}

/// A user's series after perturbation. `noise_used` is kept for auditing;
/// a collector only ever receives `samples`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedSeries {
    pub user_index: usize,
    pub window_size: usize,
    pub samples: Vec<f64>,
    pub noise_used: Vec<NoiseVector>,
    /// Trailing samples that did not fill a window and were not sent.
    pub dropped: usize,
}

impl PerturbedSeries {
    pub fn window_count(&self) -> usize {
        self.noise_used.len()
    }

    /// Noise values concatenated in sample order.
    pub fn flat_noise(&self) -> Vec<f64> {
        self.noise_used
            .iter()
            .flat_map(|n| n.values.iter().copied())
            .collect()
    }

    /// Recovers the original samples as `perturbed − noise`.
    pub fn reconstruct_original(&self) -> Vec<f64> {
        self.samples
            .iter()
            .zip(self.flat_noise())
            .map(|(p, n)| p - n)
            .collect()
    }
}

/// `window[j] + noise[j]`.
pub fn perturb_window(window: &[f64], noise: &NoiseVector) -> Result<Vec<f64>> {
    if window.len() != noise.values.len() {
        return Err(Error::LengthMismatch {
            left: window.len(),
            right: noise.values.len(),
        });
    }
    Ok(window
        .iter()
        .zip(&noise.values)
        .map(|(x, n)| x + n)
        .collect())
}

/// Perturbs every complete window of `series` with a fresh noise vector.
/// Window `w` uses the stream for `(seed, user, w)`.
pub fn perturb_user_series(
    series: &UserSeries,
    cfg: &CldpConfig,
    map: &PartitionMap,
) -> Result<PerturbedSeries> {
    if series.is_empty() {
        return Err(Error::EmptyInput);
    }
    let user = series.user_index;
    let l = cfg.window_size();
    let grid = tossing_grid(map.partition_of(user)?, cfg)?;

    let mut samples = Vec::with_capacity(series.window_count(l) * l);
    let mut noise_used = Vec::with_capacity(series.window_count(l));
    for (w, window) in series.windows(l).enumerate() {
        let noise = draw_noise(&grid, user, w, cfg)?;
        samples.extend(perturb_window(window, &noise)?);
        noise_used.push(noise);
    }
    Ok(PerturbedSeries {
        user_index: user,
        window_size: l,
        samples,
        noise_used,
        dropped: series.trailing_len(l),
    })
}

/// Perturbs all users' series under the configuration's partition map.
pub fn perturb_all(series: &[UserSeries], cfg: &CldpConfig) -> Result<Vec<PerturbedSeries>> {
    if series.len() != cfg.num_users() {
        return Err(Error::UserCountMismatch {
            expected: cfg.num_users(),
            actual: series.len(),
        });
    }
    let map = PartitionMap::for_config(cfg);
    series
        .iter()
        .map(|s| perturb_user_series(s, cfg, &map))
        .collect()
}
