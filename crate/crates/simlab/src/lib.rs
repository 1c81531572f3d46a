//! Simulation studies over the expression GA: automated selection toward a
//! target, convergence distributions, KL tracking, GMM separability, target
//! bias, activation and selection-pressure experiments.

mod config;
pub mod export;
pub mod gmm;
mod select;
mod simulate;
pub mod stats;
pub mod studies;
pub mod targets;

pub use config::{default_schedule, SimConfig};
pub use gmm::{fit_gmm, separability_table, GmmModel, GmmOptions, SeparabilityTable};
pub use select::{auto_select, AutoSelector};
pub use simulate::{cd_error, run_simulation, simulate_repetition, DistributionStats, GenerationStats, Repetition};
pub use stats::{kl_divergence, kl_series, repeatability_bins, KL_BINS, KL_SMOOTHING};
