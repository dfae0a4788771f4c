//! Exact event-driven trajectories.
//!
//! Stochastic mode runs the direct method over five channels (sensitive birth, sensitive
//! death, mutation, resistant birth, resistant death). Deterministic mode keeps the
//! sensitive curve analytic: the next mutation time comes from inverting the cumulative
//! intensity, and it races a homogeneous exponential clock for clone events.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Geometric};
use serde::{Deserialize, Serialize};

use super::clones::{CloneSelector, FenwickSelector};
use super::{SimError, StopRule};
use crate::analytics;
use crate::model::{CloneRecord, EventCounts, Recurrence, SensitiveMode, TrajectoryOutcome, ValidParams};
use crate::numerics::Tolerances;

/// Population state observed at a fixed time during a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub z0: f64,
    pub z1: u64,
    pub clones_generated: u64,
}

/// Validated parameters plus the deterministic recurrence proxy `zeta_n(a)`.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: ValidParams<f64>,
    zeta: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Plan {
    end: f64,
    stop_on_recurrence: bool,
    /// Abandon the run once this time passes without recurrence.
    deadline: Option<f64>,
}

impl Simulator {
    pub fn new(params: ValidParams<f64>) -> Result<Self, SimError> {
        let zeta = analytics::zeta(&params, &Tolerances::default())?;
        Ok(Simulator { params, zeta })
    }

    pub fn params(&self) -> &ValidParams<f64> {
        &self.params
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Censoring horizon for [`StopRule::RecurrenceThreshold`]: `zeta_n + 10 / lambda1`.
    pub fn default_horizon(&self) -> f64 {
        self.zeta + 10.0 / self.params.lambda1()
    }

    pub(crate) fn plan(&self, stop: StopRule, deadline: Option<f64>) -> Result<Plan, SimError> {
        stop.check()?;
        let (end, stop_on_recurrence) = match stop {
            StopRule::RecurrenceThreshold => (self.default_horizon(), true),
            StopRule::Horizon(t) => (t, true),
            StopRule::FixedTime(t) => (t, false),
        };
        Ok(Plan { end, stop_on_recurrence, deadline })
    }

    pub fn run(&self, stop: StopRule, seed: u64) -> Result<TrajectoryOutcome, SimError> {
        let plan = self.plan(stop, None)?;
        Ok(self.execute::<FenwickSelector>(&plan, seed, &[]).expect("no deadline").0)
    }

    /// Runs and also records the state at each of `times` (ascending) reached before stopping.
    pub fn run_observed(
        &self,
        stop: StopRule,
        seed: u64,
        times: &[f64],
    ) -> Result<(TrajectoryOutcome, Vec<Snapshot>), SimError> {
        if times.windows(2).any(|w| w[0] > w[1]) || times.iter().any(|t| !(*t >= 0.0)) {
            return Err(SimError::UnsortedObservationTimes);
        }
        let plan = self.plan(stop, None)?;
        Ok(self.execute::<FenwickSelector>(&plan, seed, times).expect("no deadline"))
    }

    /// Core loop. Returns `None` if the plan's deadline passed without recurrence.
    pub(crate) fn execute<S: CloneSelector>(
        &self,
        plan: &Plan,
        seed: u64,
        observe: &[f64],
    ) -> Option<(TrajectoryOutcome, Vec<Snapshot>)> {
        let p = &self.params;
        let raw = p.raw();
        let (r0, d0, r1, d1) = (raw.r0, raw.d0, raw.r1, raw.d1);
        let mu_cell = p.mutation_rate_per_cell();
        let threshold = p.threshold();
        let stochastic = p.mode() == SensitiveMode::Stochastic;
        let sensitive_unit = r0 + d0 + mu_cell;
        let clone_unit = r1 + d1;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = 0.0;
        let mut z0: u64 = p.n();
        let mut z1: u64 = 0;
        let mut clones: Vec<CloneRecord> = Vec::new();
        let mut selector = S::default();
        let mut events = EventCounts::default();
        let mut recurrence: Option<f64> = None;
        let mut snapshots = Vec::with_capacity(observe.len());
        let mut next_obs = 0;

        let mut mutation_mass = 0.0;
        let mut next_mutation = f64::INFINITY;
        if !stochastic {
            mutation_mass += rng.sample::<f64, _>(Exp1);
            next_mutation = p.inverse_cumulative_mutation_intensity(mutation_mass).unwrap_or(f64::INFINITY);
        }

        let sensitive_at = |time: f64, count: u64| if stochastic { count as f64 } else { p.deterministic_sensitive(time) };

        let stop_time = loop {
            let clone_rate = clone_unit * z1 as f64;
            let (t_next, total) = if stochastic {
                let total = sensitive_unit * z0 as f64 + clone_rate;
                let wait = if total > 0.0 { rng.sample::<f64, _>(Exp1) / total } else { f64::INFINITY };
                (t + wait, total)
            } else {
                let t_clone =
                    if clone_rate > 0.0 { t + rng.sample::<f64, _>(Exp1) / clone_rate } else { f64::INFINITY };
                (t_clone.min(next_mutation), clone_rate)
            };

            if recurrence.is_none() {
                if let Some(deadline) = plan.deadline {
                    if t_next >= deadline {
                        return None;
                    }
                }
            }
            while next_obs < observe.len() && observe[next_obs] < t_next && observe[next_obs] <= plan.end {
                let time = observe[next_obs];
                snapshots.push(Snapshot {
                    time,
                    z0: sensitive_at(time, z0),
                    z1,
                    clones_generated: clones.len() as u64,
                });
                next_obs += 1;
            }
            if t_next > plan.end {
                break plan.end;
            }
            t = t_next;

            // Which channel fired.
            let mutation;
            let mut grow = false;
            if stochastic {
                let mut u = rng.gen::<f64>() * total;
                let zf = z0 as f64;
                if u < r0 * zf {
                    z0 += 1;
                    events.sensitive_births += 1;
                    continue;
                }
                u -= r0 * zf;
                if u < d0 * zf {
                    z0 -= 1;
                    events.sensitive_deaths += 1;
                    continue;
                }
                u -= d0 * zf;
                // Float round-off can leave u marginally above the clone share;
                // an empty clone pool then means the event was a mutation.
                mutation = u < mu_cell * zf || z1 == 0;
                if !mutation {
                    grow = u - mu_cell * zf < r1 * z1 as f64;
                }
            } else {
                mutation = t == next_mutation;
                if mutation {
                    mutation_mass += rng.sample::<f64, _>(Exp1);
                    next_mutation = p.inverse_cumulative_mutation_intensity(mutation_mass).unwrap_or(f64::INFINITY);
                } else {
                    grow = rng.gen::<f64>() * clone_unit < r1;
                }
            }

            if mutation {
                clones.push(CloneRecord { id: clones.len() as u64, birth_time: t, size: 1 });
                selector.push(1);
                z1 += 1;
                events.mutations += 1;
            } else {
                let idx = selector.select(rng.gen_range(0..z1));
                if grow {
                    clones[idx].size += 1;
                    selector.add(idx, 1);
                    z1 += 1;
                    events.resistant_births += 1;
                } else {
                    clones[idx].size -= 1;
                    selector.add(idx, -1);
                    z1 -= 1;
                    events.resistant_deaths += 1;
                }
            }
            debug_assert_eq!(selector.total(), z1, "resistant count out of sync with clone sizes");

            if (mutation || grow) && recurrence.is_none() && z1 as f64 > threshold {
                recurrence = Some(t);
                if plan.stop_on_recurrence {
                    break t;
                }
            }
        };

        if recurrence.is_none() {
            if let Some(deadline) = plan.deadline {
                if stop_time >= deadline {
                    return None;
                }
            }
        }
        while next_obs < observe.len() && observe[next_obs] <= stop_time {
            let time = observe[next_obs];
            snapshots.push(Snapshot { time, z0: sensitive_at(time, z0), z1, clones_generated: clones.len() as u64 });
            next_obs += 1;
        }

        let outcome = TrajectoryOutcome {
            recurrence: match recurrence {
                Some(time) => Recurrence::Reached { time },
                None => Recurrence::Censored { horizon: plan.end },
            },
            stop_time,
            clone_records: clones,
            z1_final: z1,
            z0_final: sensitive_at(stop_time, z0),
            seed,
            events,
        };
        Some((outcome, snapshots))
    }
}

/// One exact trajectory under `stop`, fully determined by `seed`.
pub fn simulate_one(params: &ValidParams<f64>, stop: StopRule, seed: u64) -> Result<TrajectoryOutcome, SimError> {
    Simulator::new(*params)?.run(stop, seed)
}

/// Size at age `dt` of a pure-birth clone of rate `lambda1` founded by one cell:
/// geometric on `{1, 2, ...}` with success probability `exp(-lambda1 dt)`.
pub fn yule_size_at<R: Rng + ?Sized>(lambda1: f64, dt: f64, rng: &mut R) -> u64 {
    let p = (-lambda1 * dt).exp();
    if p >= 1.0 {
        return 1;
    }
    1 + Geometric::new(p).expect("success probability in (0, 1)").sample(rng)
}

/// Size at time `t` of one birth-death clone founded by a single cell at time 0,
/// simulated event by event.
pub fn clone_size_at<R: Rng + ?Sized>(r1: f64, d1: f64, t: f64, rng: &mut R) -> u64 {
    let mut size = 1u64;
    let mut now = 0.0;
    while size > 0 {
        now += rng.sample::<f64, _>(Exp1) / ((r1 + d1) * size as f64);
        if now > t {
            break;
        }
        if rng.gen::<f64>() * (r1 + d1) < r1 {
            size += 1;
        } else {
            size -= 1;
        }
    }
    size
}
