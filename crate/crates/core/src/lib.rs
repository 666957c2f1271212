//! Cooperative local differential privacy for multi-user time series.
//!
//! Users share one period of a sine wave, each owning an equal slice of it.
//! A user perturbs every window of its series with sine values taken from
//! its own slice; because the slices together cover the full period, the
//! noise contributed by all users sums to zero at the collector while each
//! individual report stays distorted.
//!
//! ```
//! use cldp::{aggregate, perturb_all, CldpConfig, UserSeries};
//!
//! let cfg = CldpConfig::builder(4, 5, 20, 3.0).seed(7).build()?;
//! let users: Vec<UserSeries> = (1..=4).map(|i| UserSeries::new(i, vec![1.0; 60])).collect();
//! let perturbed = perturb_all(&users, &cfg)?;
//! let mut report = aggregate(&perturbed, 4)?;
//! report.attach_truth(&users)?;
//! assert!(report.residual_noise_per_window.iter().all(|r| r.abs() < 1e-9));
//! # Ok::<(), cldp::Error>(())
//! ```

pub mod aggregation;
pub mod baseline;
pub mod data;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod noise;
pub mod perturbation;
pub mod rng;

pub use aggregation::{aggregate, residual, true_window_totals, AggregateReport};
pub use baseline::{laplace_perturb, LaplaceConfig};
pub use data::{load_power_csv, split_users, synth_series, RawDataset, Signal, SynthSpec};
pub use error::{Error, Result};
pub use metrics::{aggregate_error, break_probability, epsilon_proxy, mse, PrivacyReport};
pub use noise::{
    partition_interval, sample_noise_vector, sample_window_noise, tossing_grid, CldpConfig,
    NoiseMode, NoiseVector, PartitionAssignment, PartitionMap, TossingGrid,
};
pub use perturbation::{
    perturb_all, perturb_user_series, perturb_window, PerturbedSeries, UserSeries,
};
