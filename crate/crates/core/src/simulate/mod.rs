//! Exact stochastic simulation of the two-type process.
//!
//! Each trajectory is driven by its own `ChaCha8Rng` seeded from `(master_seed, index)`,
//! so ensembles are reproducible regardless of how many worker threads run them.

pub mod clones;
mod diversity;
mod engine;
mod ensemble;
pub mod io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::AnalyticsError;

pub use diversity::{diversity_summary, simpson_index};
pub use engine::{clone_size_at, simulate_one, yule_size_at, Simulator, Snapshot};
pub use ensemble::{
    replicate_seed, run_ensemble, run_observed_ensemble, EarlyRecurrence, Ensemble, EnsembleOptions,
    ObservedEnsemble,
};

/// When a trajectory stops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "t", rename_all = "snake_case")]
pub enum StopRule {
    /// First time the resistant count exceeds `a n`, censored at `zeta_n + 10 / lambda1`.
    RecurrenceThreshold,
    /// Run to exactly this time, whether or not recurrence happened.
    FixedTime(f64),
    /// Stop at recurrence or at this time, whichever comes first.
    Horizon(f64),
}

impl StopRule {
    pub(crate) fn check(self) -> Result<(), SimError> {
        match self {
            StopRule::RecurrenceThreshold => Ok(()),
            StopRule::FixedTime(t) | StopRule::Horizon(t) if t.is_finite() && t > 0.0 => Ok(()),
            StopRule::FixedTime(t) | StopRule::Horizon(t) => Err(SimError::InvalidStopTime { t }),
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error("stop time {t} must be finite and > 0")]
    InvalidStopTime { t: f64 },
    #[error("observation times must be ascending and >= 0")]
    UnsortedObservationTimes,
    #[error("early-recurrence margin y = {y} must satisfy 0 < y < zeta = {zeta}")]
    InvalidMargin { y: f64, zeta: f64 },
    #[error("window ({t1}, {t2}) must satisfy 0 <= t1 < t2")]
    InvalidWindow { t1: f64, t2: f64 },
    #[error("conditioning on recurrence before zeta - {y} needs runs to last until at least {}", zeta - y)]
    ConditioningEndsEarly { y: f64, zeta: f64 },
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}
