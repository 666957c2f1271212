//! Sine-wave partitioning and per-user noise generation.
//!
//! One full period of `y(t) = A·sin(2πt/T)` is cut into `u` equal half-open
//! partitions, one per user. Each partition carries `k` equally spaced
//! tossing points; the sine values at those points form the only noise
//! values that user may ever add. Because the `u·k` points of all users form
//! a uniform grid over a full period, their sine values sum to zero, which is
//! what lets the collector's aggregate cancel the noise.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{self, TAG_ASSIGN, TAG_NOISE};

/// How a user turns its grid amplitudes into a window of noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NoiseMode {
    /// Seeded permutation of `l/k` full copies of the grid amplitudes.
    /// Window sums across users cancel exactly.
    #[default]
    Shuffle,
    /// `l` independent uniform draws (with replacement) from the grid
    /// amplitudes. Cancels only in expectation.
    Toss,
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseMode::Shuffle => f.write_str("shuffle"),
            NoiseMode::Toss => f.write_str("toss"),
        }
    }
}

impl FromStr for NoiseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "shuffle" => Ok(NoiseMode::Shuffle),
            "toss" => Ok(NoiseMode::Toss),
            other => Err(Error::Config(format!("unknown noise mode `{other}`"))),
        }
    }
}

/// Full parameterization of the mechanism. Only constructible through
/// [`CldpConfigBuilder::build`], which enforces the invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct CldpConfig {
    num_users: usize,
    tossing_space: usize,
    window_size: usize,
    amplitude: f64,
    period: f64,
    mode: NoiseMode,
    master_seed: u64,
    randomize_assignment: bool,
}

impl CldpConfig {
    /// Starts a builder with period 1, Shuffle mode, seed 0 and the identity
    /// user-to-partition assignment.
    pub fn builder(
        num_users: usize,
        tossing_space: usize,
        window_size: usize,
        amplitude: f64,
    ) -> CldpConfigBuilder {
        CldpConfigBuilder {
            num_users,
            tossing_space,
            window_size,
            amplitude,
            period: 1.0,
            mode: NoiseMode::Shuffle,
            master_seed: 0,
            randomize_assignment: false,
        }
    }

    /// Shorthand for `builder(..).build()` with all defaults.
    pub fn new(
        num_users: usize,
        tossing_space: usize,
        window_size: usize,
        amplitude: f64,
    ) -> Result<Self> {
        Self::builder(num_users, tossing_space, window_size, amplitude).build()
    }

    /// A builder pre-filled with this configuration, for deriving variants.
    pub fn to_builder(&self) -> CldpConfigBuilder {
        CldpConfigBuilder {
            num_users: self.num_users,
            tossing_space: self.tossing_space,
            window_size: self.window_size,
            amplitude: self.amplitude,
            period: self.period,
            mode: self.mode,
            master_seed: self.master_seed,
            randomize_assignment: self.randomize_assignment,
        }
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn tossing_space(&self) -> usize {
        self.tossing_space
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn mode(&self) -> NoiseMode {
        self.mode
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn randomize_assignment(&self) -> bool {
        self.randomize_assignment
    }

    /// Number of points on the combined grid, `u·k`.
    pub fn grid_len(&self) -> usize {
        self.num_users * self.tossing_space
    }
}

impl fmt::Display for CldpConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "u={} k={} l={} A={} T={} mode={} seed={}{}",
            self.num_users,
            self.tossing_space,
            self.window_size,
            self.amplitude,
            self.period,
            self.mode,
            self.master_seed,
            if self.randomize_assignment {
                " randomized"
            } else {
                ""
            }
        )
    }
}

#[derive(Debug, Clone)]
pub struct CldpConfigBuilder {
    num_users: usize,
    tossing_space: usize,
    window_size: usize,
    amplitude: f64,
    period: f64,
    mode: NoiseMode,
    master_seed: u64,
    randomize_assignment: bool,
}

impl CldpConfigBuilder {
    pub fn num_users(mut self, u: usize) -> Self {
        self.num_users = u;
        self
    }

    pub fn tossing_space(mut self, k: usize) -> Self {
        self.tossing_space = k;
        self
    }

    pub fn window_size(mut self, l: usize) -> Self {
        self.window_size = l;
        self
    }

    pub fn amplitude(mut self, a: f64) -> Self {
        self.amplitude = a;
        self
    }

    pub fn period(mut self, t: f64) -> Self {
        self.period = t;
        self
    }

    pub fn mode(mut self, mode: NoiseMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn randomize_assignment(mut self, on: bool) -> Self {
        self.randomize_assignment = on;
        self
    }

    pub fn build(self) -> Result<CldpConfig> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.num_users < 2 || !self.num_users.is_multiple_of(2) {
            return fail(format!(
                "number of users must be even and at least 2, got {}",
                self.num_users
            ));
        }
        if self.tossing_space < 1 {
            return fail("tossing space k must be at least 1".into());
        }
        if self.window_size < 1 {
            return fail("window size l must be at least 1".into());
        }
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return fail(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            ));
        }
        if !(self.period.is_finite() && self.period > 0.0) {
            return fail(format!("period must be positive, got {}", self.period));
        }
        if self.mode == NoiseMode::Shuffle && !self.window_size.is_multiple_of(self.tossing_space) {
            return fail(format!(
                "shuffle mode needs l mod k = 0, got l={} k={}",
                self.window_size, self.tossing_space
            ));
        }
        Ok(CldpConfig {
            num_users: self.num_users,
            tossing_space: self.tossing_space,
            window_size: self.window_size,
            amplitude: self.amplitude,
            period: self.period,
            mode: self.mode,
            master_seed: self.master_seed,
            randomize_assignment: self.randomize_assignment,
        })
    }
}

/// Half-open phase interval `[start, end)` owned by one partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionAssignment {
    /// 1-based partition index. Equals the user index under the identity
    /// assignment.
    pub index: usize,
    pub start: f64,
    pub end: f64,
}

impl PartitionAssignment {
    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t < self.end
    }
}

fn check_index(i: usize, cfg: &CldpConfig) -> Result<()> {
    if i < 1 || i > cfg.num_users {
        Err(Error::IndexOutOfRange {
            index: i,
            num_users: cfg.num_users,
        })
    } else {
        Ok(())
    }
}

// Phase of grid position `num/den` of a period. The ratio is formed first so
// that equal rationals land on bit-identical phases.
fn phase(num: usize, den: usize, period: f64) -> f64 {
    (num as f64 / den as f64) * period
}

/// `[(i-1)·T/u, i·T/u)` for partition `i`.
pub fn partition_interval(i: usize, cfg: &CldpConfig) -> Result<PartitionAssignment> {
    check_index(i, cfg)?;
    let u = cfg.num_users;
    Ok(PartitionAssignment {
        index: i,
        start: phase(i - 1, u, cfg.period),
        end: phase(i, u, cfg.period),
    })
}

/// The `k` tossing points of one partition and the sine amplitudes there.
#[derive(Debug, Clone, PartialEq)]
pub struct TossingGrid {
    pub partition: usize,
    pub points: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl TossingGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `A·sin(2π·m/n)` for grid position `m` of `n`. For even `n` the second
/// half-period is evaluated as the exact negation of the first, so
/// antiphase partitions carry bitwise-opposite amplitudes.
fn grid_amplitude(m: usize, n: usize, amplitude: f64) -> f64 {
    if n.is_multiple_of(2) && m >= n / 2 {
        -grid_amplitude(m - n / 2, n, amplitude)
    } else {
        amplitude * (TAU * (m as f64 / n as f64)).sin()
    }
}

/// Tossing points `t_{i,j} = (i-1)·T/u + j·(T/u)/k` for `j = 0..k`.
pub fn tossing_grid(i: usize, cfg: &CldpConfig) -> Result<TossingGrid> {
    check_index(i, cfg)?;
    let k = cfg.tossing_space;
    let n = cfg.grid_len();
    let (points, amplitudes) = ((i - 1) * k..i * k)
        .map(|m| (phase(m, n, cfg.period), grid_amplitude(m, n, cfg.amplitude)))
        .unzip();
    Ok(TossingGrid {
        partition: i,
        points,
        amplitudes,
    })
}

/// Which partition each user perturbs with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMap {
    // partitions[user - 1] is that user's 1-based partition
    partitions: Vec<usize>,
}

impl PartitionMap {
    pub fn identity(num_users: usize) -> Self {
        Self {
            partitions: (1..=num_users).collect(),
        }
    }

    /// Seeded permutation of partitions over users.
    pub fn randomized(num_users: usize, master_seed: u64) -> Self {
        let mut partitions: Vec<usize> = (1..=num_users).collect();
        partitions.shuffle(&mut rng::stream(master_seed, &[TAG_ASSIGN]));
        Self { partitions }
    }

    pub fn for_config(cfg: &CldpConfig) -> Self {
        if cfg.randomize_assignment {
            Self::randomized(cfg.num_users, cfg.master_seed)
        } else {
            Self::identity(cfg.num_users)
        }
    }

    pub fn num_users(&self) -> usize {
        self.partitions.len()
    }

    pub fn partition_of(&self, user: usize) -> Result<usize> {
        user.checked_sub(1)
            .and_then(|idx| self.partitions.get(idx).copied())
            .ok_or(Error::IndexOutOfRange {
                index: user,
                num_users: self.partitions.len(),
            })
    }
}

/// One window's worth of noise `λ` for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseVector {
    pub user_index: usize,
    pub partition: usize,
    pub window_index: usize,
    pub values: Vec<f64>,
}

/// Draws one window of noise from `grid` using the stream for
/// `(seed, user, window)`.
pub(crate) fn draw_noise(
    grid: &TossingGrid,
    user: usize,
    window: usize,
    cfg: &CldpConfig,
) -> Result<NoiseVector> {
    let l = cfg.window_size;
    let k = grid.len();
    let mut stream = rng::stream(cfg.master_seed, &[TAG_NOISE, user as u64, window as u64]);
    let values = match cfg.mode {
        NoiseMode::Shuffle => {
            if !l.is_multiple_of(k) {
                return Err(Error::Config(format!(
                    "shuffle mode needs l mod k = 0, got l={l} k={k}"
                )));
            }
            let mut values: Vec<f64> = grid.amplitudes.iter().copied().cycle().take(l).collect();
            values.shuffle(&mut stream);
            values
        }
        NoiseMode::Toss => (0..l)
            .map(|_| grid.amplitudes[stream.random_range(0..k)])
            .collect(),
    };
    Ok(NoiseVector {
        user_index: user,
        partition: grid.partition,
        window_index: window,
        values,
    })
}

/// Noise for `user`'s window number `window`, on the partition `map` assigns.
pub fn sample_window_noise(
    user: usize,
    window: usize,
    cfg: &CldpConfig,
    map: &PartitionMap,
) -> Result<NoiseVector> {
    check_index(user, cfg)?;
    let grid = tossing_grid(map.partition_of(user)?, cfg)?;
    draw_noise(&grid, user, window, cfg)
}

/// Noise for the first window of `user`, under the configuration's own
/// partition assignment.
pub fn sample_noise_vector(user: usize, cfg: &CldpConfig) -> Result<NoiseVector> {
    sample_window_noise(user, 0, cfg, &PartitionMap::for_config(cfg))
}
