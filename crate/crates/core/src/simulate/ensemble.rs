use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::clones::FenwickSelector;
use super::engine::{Simulator, Snapshot};
use super::{SimError, StopRule};
use crate::model::{TrajectoryOutcome, ValidParams};

/// Condition on recurrence strictly before `zeta_n - y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyRecurrence {
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleOptions {
    /// Maximum number of attempts when conditioning by rejection.
    pub attempt_budget: u64,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        EnsembleOptions { attempt_budget: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    /// Accepted outcomes, in attempt-index order.
    pub outcomes: Vec<TrajectoryOutcome>,
    pub accepted: u64,
    /// Attempts consumed up to and including the last accepted one.
    pub attempted: u64,
    pub master_seed: u64,
    pub budget_exhausted: bool,
    /// Accepted outcomes that never reached the threshold.
    pub censored: u64,
}

impl Ensemble {
    pub fn acceptance_rate(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempted as f64
        }
    }

    /// Outcomes that reached the threshold.
    pub fn recurred(&self) -> impl Iterator<Item = &TrajectoryOutcome> {
        self.outcomes.iter().filter(|o| !o.recurrence.is_censored())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservedEnsemble {
    pub outcomes: Vec<TrajectoryOutcome>,
    /// `snapshots[i][j]` is replicate `i` at the `j`-th requested time, if it got there.
    pub snapshots: Vec<Vec<Snapshot>>,
}

/// SplitMix64 of `master` advanced by `index + 1` steps.
pub fn replicate_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `replicates` independent trajectories on the current rayon pool.
///
/// With `condition`, attempt `i` (seeded by `replicate_seed(master_seed, i)`) is abandoned
/// as soon as it passes `zeta_n - y` without recurrence, and the first `replicates`
/// successes in index order are kept. The result does not depend on the thread count.
/// A [`StopRule::FixedTime`] of at least `zeta_n - y` observes accepted runs past recurrence.
pub fn run_ensemble(
    params: &ValidParams<f64>,
    stop: StopRule,
    replicates: usize,
    master_seed: u64,
    condition: Option<EarlyRecurrence>,
    options: &EnsembleOptions,
) -> Result<Ensemble, SimError> {
    let sim = Simulator::new(*params)?;
    let deadline = match condition {
        None => None,
        Some(EarlyRecurrence { y }) => {
            if !(y > 0.0 && y < sim.zeta()) {
                return Err(SimError::InvalidMargin { y, zeta: sim.zeta() });
            }
            if matches!(stop, StopRule::FixedTime(t) if t < sim.zeta() - y) {
                return Err(SimError::ConditioningEndsEarly { y, zeta: sim.zeta() });
            }
            Some(sim.zeta() - y)
        }
    };
    let plan = sim.plan(stop, deadline)?;

    let mut outcomes = Vec::with_capacity(replicates);
    let mut attempted = 0u64;
    let mut next = 0u64;
    let budget = if deadline.is_some() { options.attempt_budget } else { replicates as u64 };
    let chunk = (replicates as u64).clamp(64, 4096);
    while outcomes.len() < replicates && next < budget {
        let end = (next + chunk).min(budget);
        let batch: Vec<_> = (next..end)
            .into_par_iter()
            .map(|i| sim.execute::<FenwickSelector>(&plan, replicate_seed(master_seed, i), &[]).map(|r| (i, r.0)))
            .collect();
        for (i, outcome) in batch.into_iter().flatten() {
            if outcomes.len() == replicates {
                break;
            }
            outcomes.push(outcome);
            attempted = i + 1;
        }
        next = end;
    }
    if outcomes.len() < replicates {
        attempted = next;
    }
    let censored = outcomes.iter().filter(|o| o.recurrence.is_censored()).count() as u64;
    Ok(Ensemble {
        accepted: outcomes.len() as u64,
        budget_exhausted: outcomes.len() < replicates,
        outcomes,
        attempted,
        master_seed,
        censored,
    })
}

/// Unconditioned ensemble that also records each replicate at the ascending `times`.
pub fn run_observed_ensemble(
    params: &ValidParams<f64>,
    stop: StopRule,
    replicates: usize,
    master_seed: u64,
    times: &[f64],
) -> Result<ObservedEnsemble, SimError> {
    let sim = Simulator::new(*params)?;
    let runs = (0..replicates as u64)
        .into_par_iter()
        .map(|i| sim.run_observed(stop, replicate_seed(master_seed, i), times))
        .collect::<Result<Vec<_>, _>>()?;
    let (outcomes, snapshots) = runs.into_iter().unzip();
    Ok(ObservedEnsemble { outcomes, snapshots })
}
