//! Model constants, their validation, and the record types produced by simulation.
//!
//! Sensitive cells decay at net rate `lambda0 = r0 - d0 < 0`; every mutation founds a
//! new resistant clone that grows as a birth-death process with net rate
//! `lambda1 = r1 - d1 > 0`. Mutations occur at rate `mu * n^-alpha` per sensitive cell.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// How the sensitive population evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SensitiveMode {
    /// `Z0(t) = n exp(lambda0 t)`, a real-valued deterministic curve.
    #[default]
    Deterministic,
    /// Birth-death process with rates `r0`, `d0` started from `n` cells.
    Stochastic,
}

/// Raw model constants as read from a configuration document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams<F> {
    pub r0: F,
    pub d0: F,
    pub r1: F,
    pub d1: F,
    pub mu: F,
    pub alpha: F,
    pub n: u64,
    pub a: F,
    #[serde(default)]
    pub sensitive_mode: SensitiveMode,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameter `{name}` is not finite")]
    NotFinite { name: &'static str },
    #[error("rate `{name}` = {value} is negative")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("sensitive population must decay: lambda0 = r0 - d0 = {lambda0} is not < 0")]
    SensitiveNotDecaying { lambda0: f64 },
    #[error("resistant clones must be supercritical: lambda1 = r1 - d1 = {lambda1} is not > 0")]
    ResistantNotSupercritical { lambda1: f64 },
    #[error("mutation exponent alpha = {alpha} is outside (0, 1)")]
    AlphaOutOfRange { alpha: f64 },
    #[error("mutation scale mu = {mu} must be > 0")]
    NonPositiveMu { mu: f64 },
    #[error("initial population n must be >= 1")]
    NonPositiveN,
    #[error("recurrence threshold fraction a = {a} must be > 0")]
    NonPositiveThreshold { a: f64 },
}

impl<F: Scalar> ModelParams<F> {
    pub fn validate(self) -> Result<ValidParams<F>, ParamError> {
        validate(self)
    }
}

/// Checks the standing assumptions and derives the net growth rates.
pub fn validate<F: Scalar>(params: ModelParams<F>) -> Result<ValidParams<F>, ParamError> {
    let named = [
        ("r0", params.r0),
        ("d0", params.d0),
        ("r1", params.r1),
        ("d1", params.d1),
        ("mu", params.mu),
        ("alpha", params.alpha),
        ("a", params.a),
    ];
    for (name, value) in named {
        if !value.is_finite() {
            return Err(ParamError::NotFinite { name });
        }
    }
    for (name, value) in &named[..4] {
        if *value < F::zero() {
            return Err(ParamError::NegativeRate { name, value: value.as_f64() });
        }
    }
    let lambda0 = params.r0 - params.d0;
    let lambda1 = params.r1 - params.d1;
    if lambda0 >= F::zero() {
        return Err(ParamError::SensitiveNotDecaying { lambda0: lambda0.as_f64() });
    }
    if lambda1 <= F::zero() {
        return Err(ParamError::ResistantNotSupercritical { lambda1: lambda1.as_f64() });
    }
    if !(params.alpha > F::zero() && params.alpha < F::one()) {
        return Err(ParamError::AlphaOutOfRange { alpha: params.alpha.as_f64() });
    }
    if params.mu <= F::zero() {
        return Err(ParamError::NonPositiveMu { mu: params.mu.as_f64() });
    }
    if params.n == 0 {
        return Err(ParamError::NonPositiveN);
    }
    if params.a <= F::zero() {
        return Err(ParamError::NonPositiveThreshold { a: params.a.as_f64() });
    }
    Ok(ValidParams { raw: params, lambda0, lambda1 })
}

/// Parameters that passed [`validate`]; `lambda0 < 0 < lambda1` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidParams<F> {
    #[serde(flatten)]
    raw: ModelParams<F>,
    lambda0: F,
    lambda1: F,
}

impl<F: Scalar> ValidParams<F> {
    pub fn raw(&self) -> &ModelParams<F> {
        &self.raw
    }

    pub fn lambda0(&self) -> F {
        self.lambda0
    }

    pub fn lambda1(&self) -> F {
        self.lambda1
    }

    pub fn mu(&self) -> F {
        self.raw.mu
    }

    pub fn alpha(&self) -> F {
        self.raw.alpha
    }

    pub fn n(&self) -> u64 {
        self.raw.n
    }

    pub fn n_real(&self) -> F {
        F::from_count(self.raw.n)
    }

    pub fn mode(&self) -> SensitiveMode {
        self.raw.sensitive_mode
    }

    /// Same constants with a different initial population.
    pub fn with_n(&self, n: u64) -> Result<Self, ParamError> {
        validate(ModelParams { n, ..self.raw })
    }

    /// Revalidates after editing the raw constants.
    pub fn modified(&self, edit: impl FnOnce(&mut ModelParams<F>)) -> Result<Self, ParamError> {
        let mut raw = self.raw;
        edit(&mut raw);
        validate(raw)
    }

    pub fn with_mode(&self, sensitive_mode: SensitiveMode) -> Self {
        ValidParams { raw: ModelParams { sensitive_mode, ..self.raw }, ..*self }
    }

    /// Per-cell mutation rate `mu n^-alpha`.
    pub fn mutation_rate_per_cell(&self) -> F {
        self.raw.mu * self.n_real().powf(-self.raw.alpha)
    }

    /// The diversity scale `n^(1-alpha)`.
    pub fn diversity_scale(&self) -> F {
        self.n_real().powf(F::one() - self.raw.alpha)
    }

    /// Recurrence threshold `a n`; recurrence means strictly exceeding it.
    pub fn threshold(&self) -> F {
        self.raw.a * self.n_real()
    }

    /// Deterministic sensitive population `n exp(lambda0 t)`.
    pub fn deterministic_sensitive(&self, t: F) -> F {
        self.n_real() * (self.lambda0 * t).exp()
    }

    /// Immigration rate of new clones given `z0` sensitive cells.
    pub fn mutation_intensity(&self, z0: F) -> F {
        z0 * self.mutation_rate_per_cell()
    }

    /// Immigration rate at time `t` along the deterministic sensitive curve.
    pub fn deterministic_mutation_intensity(&self, t: F) -> F {
        self.mutation_intensity(self.deterministic_sensitive(t))
    }

    /// Total immigration `mu n^(1-alpha) / -lambda0` over `[0, inf)` in deterministic mode.
    pub fn total_mutation_mass(&self) -> F {
        self.raw.mu * self.diversity_scale() / -self.lambda0
    }

    /// Cumulative intensity `Lambda(t)` of the deterministic-mode mutation process.
    pub fn cumulative_mutation_intensity(&self, t: F) -> F {
        self.total_mutation_mass() * -(self.lambda0 * t).exp_m1()
    }

    /// Inverse of [`Self::cumulative_mutation_intensity`]; `None` once the mass is exhausted.
    pub fn inverse_cumulative_mutation_intensity(&self, mass: F) -> Option<F> {
        let frac = mass / self.total_mutation_mass();
        if frac >= F::one() {
            return None;
        }
        Some((-frac).ln_1p() / self.lambda0)
    }
}

/// One resistant clone, frozen at the time a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloneRecord {
    pub id: u64,
    pub birth_time: f64,
    pub size: u64,
}

/// Recurrence status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Recurrence {
    /// Resistant count strictly exceeded `a n` at this event time.
    Reached { time: f64 },
    /// No recurrence observed before `horizon`.
    Censored { horizon: f64 },
}

impl Recurrence {
    pub fn time(&self) -> Option<f64> {
        match *self {
            Recurrence::Reached { time } => Some(time),
            Recurrence::Censored { .. } => None,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, Recurrence::Censored { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EventCounts {
    pub sensitive_births: u64,
    pub sensitive_deaths: u64,
    pub mutations: u64,
    pub resistant_births: u64,
    pub resistant_deaths: u64,
}

impl EventCounts {
    pub fn total(&self) -> u64 {
        self.sensitive_births
            + self.sensitive_deaths
            + self.mutations
            + self.resistant_births
            + self.resistant_deaths
    }
}

/// Result of one simulated trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOutcome {
    pub recurrence: Recurrence,
    pub stop_time: f64,
    pub clone_records: Vec<CloneRecord>,
    pub z1_final: u64,
    pub z0_final: f64,
    pub seed: u64,
    pub events: EventCounts,
}

impl TrajectoryOutcome {
    pub fn recurrence_time(&self) -> Option<f64> {
        self.recurrence.time()
    }

    /// Clones born strictly before `t`.
    pub fn clones_born_before(&self, t: f64) -> usize {
        // Records are stored in birth order.
        self.clone_records.partition_point(|c| c.birth_time < t)
    }

    pub fn sizes(&self) -> impl Iterator<Item = u64> + '_ {
        self.clone_records.iter().map(|c| c.size)
    }
}

/// Clone-count and Simpson's Index statistics of one outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversitySummary {
    pub num_clones_generated: u64,
    pub num_clones_alive: u64,
    pub simpson: f64,
    pub windows: Vec<WindowCount>,
}

/// Clones born inside `(t1, t2)` and the cells they account for at stop time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowCount {
    pub t1: f64,
    pub t2: f64,
    pub clones: u64,
    pub mass: u64,
}
