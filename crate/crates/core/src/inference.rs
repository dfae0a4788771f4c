//! Method-of-moments estimators for `(mu n^-alpha, lambda0, lambda1)` from per-patient
//! recurrence data, with percentile-bootstrap intervals.
//!
//! Given sample means `I` (clones at recurrence), `R` (Simpson's Index) and `g`
//! (recurrence time):
//!
//! ```text
//! lambda1 = ln(n / (I - sqrt(I^2 - 2I/R))) / g
//! lambda0 = lambda1 / (1 - I exp(g lambda1) / n)
//! mu_eff  = lambda1 / (exp(g lambda1) - n / I)
//! ```
//!
//! Only the effective per-cell rate `mu n^-alpha` is identifiable from one `n`.

use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{TrajectoryOutcome, ValidParams};
use crate::scalar::Scalar;
use crate::simulate::{run_ensemble, simpson_index, EnsembleOptions, SimError, StopRule};

/// One patient: clone count, Simpson's Index and time, all at recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation<F> {
    pub clone_count: u64,
    pub simpson: F,
    pub gamma: F,
}

impl Observation<f64> {
    /// Statistics of a run that reached the threshold; `None` if censored.
    pub fn from_outcome(outcome: &TrajectoryOutcome) -> Option<Self> {
        let gamma = outcome.recurrence_time()?;
        let sizes: Vec<u64> = outcome.sizes().collect();
        Some(Observation { clone_count: sizes.len() as u64, simpson: simpson_index(&sizes), gamma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateTriple<F> {
    /// Estimate of `mu n^-alpha`.
    pub mu_eff: F,
    pub lambda0_hat: F,
    pub lambda1_hat: F,
}

/// Sample means of an observation list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments<F> {
    pub clone_count: F,
    pub simpson: F,
    pub gamma: F,
}

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("no observations")]
    Empty,
    #[error("observation {index}: {reason}")]
    InvalidObservation { index: usize, reason: &'static str },
    #[error("inadmissible sample ({reason}): mean clones {clone_count}, mean simpson {simpson}, mean gamma {gamma}")]
    Inadmissible { reason: &'static str, clone_count: f64, simpson: f64, gamma: f64 },
    #[error("batch {batch}: {source}")]
    Batch {
        batch: usize,
        #[source]
        source: Box<InferenceError>,
    },
    #[error("batch {batch}: every run was censored")]
    AllCensored { batch: usize },
    #[error("{what} must be positive")]
    NonPositiveCount { what: &'static str },
    #[error("confidence level {level} not in (0, 1)")]
    InvalidLevel { level: f64 },
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error("reading observations: {0}")]
    Csv(#[from] csv::Error),
}

/// Estimates from the sample means of `observations`.
pub fn estimate<F: Scalar>(observations: &[Observation<F>], n: u64) -> Result<EstimateTriple<F>, InferenceError> {
    let m = sample_means(observations)?;
    estimate_from_moments(m, n)
}

pub fn sample_means<F: Scalar>(observations: &[Observation<F>]) -> Result<Moments<F>, InferenceError> {
    if observations.is_empty() {
        return Err(InferenceError::Empty);
    }
    for (index, o) in observations.iter().enumerate() {
        check_observation(o).map_err(|reason| InferenceError::InvalidObservation { index, reason })?;
    }
    let count = F::from_count(observations.len() as u64);
    let sum = observations.iter().fold((F::zero(), F::zero(), F::zero()), |(i, r, g), o| {
        (i + F::from_count(o.clone_count), r + o.simpson, g + o.gamma)
    });
    Ok(Moments { clone_count: sum.0 / count, simpson: sum.1 / count, gamma: sum.2 / count })
}

fn check_observation<F: Scalar>(o: &Observation<F>) -> Result<(), &'static str> {
    if o.clone_count == 0 {
        return Err("clone_count must be >= 1");
    }
    if !(o.simpson > F::zero() && o.simpson <= F::one()) {
        return Err("simpson must lie in (0, 1]");
    }
    if !(o.gamma > F::zero() && o.gamma.is_finite()) {
        return Err("gamma must be positive");
    }
    Ok(())
}

/// The estimators applied directly to moment values.
pub fn estimate_from_moments<F: Scalar>(m: Moments<F>, n: u64) -> Result<EstimateTriple<F>, InferenceError> {
    let inadmissible = |reason| InferenceError::Inadmissible {
        reason,
        clone_count: m.clone_count.as_f64(),
        simpson: m.simpson.as_f64(),
        gamma: m.gamma.as_f64(),
    };
    let (i, r, g) = (m.clone_count, m.simpson, m.gamma);
    let n = F::from_count(n);
    let x = F::lit(2.0) * i / r;
    let disc = i * i - x;
    if !(disc >= F::zero()) {
        return Err(inadmissible("I^2 - 2I/R < 0"));
    }
    // I - sqrt(I^2 - x), rewritten to avoid cancellation.
    let lower_root = x / (i + disc.sqrt());
    if !(lower_root > F::zero()) {
        return Err(inadmissible("non-positive log argument"));
    }
    let lambda1 = (n / lower_root).ln() / g;
    if !(lambda1 > F::zero()) {
        return Err(inadmissible("lambda1 estimate not positive"));
    }
    let growth = (g * lambda1).exp();
    let lambda0 = lambda1 / (F::one() - i * growth / n);
    let mu_eff = lambda1 / (growth - n / i);
    if !(lambda0 < F::zero() && mu_eff > F::zero() && lambda0.is_finite() && mu_eff.is_finite()) {
        return Err(inadmissible("lambda0 or mu estimate out of range"));
    }
    Ok(EstimateTriple { mu_eff, lambda0_hat: lambda0, lambda1_hat: lambda1 })
}

/// First-order values of the three statistics at recurrence for large `n`.
pub fn asymptotic_moments<F: Scalar>(p: &ValidParams<F>) -> Moments<F> {
    let (l0, l1) = (p.lambda0(), p.lambda1());
    let scale = p.mu() * p.diversity_scale();
    let two = F::lit(2.0);
    Moments {
        clone_count: -scale / l0,
        simpson: two * (l1 - l0) * (l1 - l0) / (scale * (two * l1 - l0)),
        gamma: ((l1 - l0) / p.mutation_rate_per_cell()).ln() / l1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<F> {
    pub lo: F,
    pub hi: F,
}

impl<F: Scalar> Interval<F> {
    pub fn contains(&self, v: F) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Per-parameter bootstrap intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi<F> {
    pub level: F,
    pub mu_eff: Interval<F>,
    pub lambda0_hat: Interval<F>,
    pub lambda1_hat: Interval<F>,
}

/// Percentile bootstrap of the mean estimate: `resamples` draws with replacement, then
/// the central `level` quantiles of the resampled means.
pub fn bootstrap_ci<F: Scalar>(
    estimates: &[EstimateTriple<F>],
    resamples: usize,
    level: F,
    seed: u64,
) -> Result<BootstrapCi<F>, InferenceError> {
    if estimates.is_empty() {
        return Err(InferenceError::Empty);
    }
    if resamples == 0 {
        return Err(InferenceError::NonPositiveCount { what: "resamples" });
    }
    check_level(level)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = F::from_count(estimates.len() as u64);
    // Means are accumulated as offsets from the first estimate so identical inputs
    // reproduce their value exactly.
    let base = [estimates[0].mu_eff, estimates[0].lambda0_hat, estimates[0].lambda1_hat];
    let mut means: [Vec<F>; 3] = Default::default();
    for _ in 0..resamples {
        let mut sum = [F::zero(); 3];
        for _ in 0..estimates.len() {
            let e = &estimates[rng.gen_range(0..estimates.len())];
            sum[0] = sum[0] + (e.mu_eff - base[0]);
            sum[1] = sum[1] + (e.lambda0_hat - base[1]);
            sum[2] = sum[2] + (e.lambda1_hat - base[2]);
        }
        for ((col, s), b) in means.iter_mut().zip(sum).zip(base) {
            col.push(b + s / k);
        }
    }
    let [mu, l0, l1] = means.map(|col| percentile_interval(col, level));
    Ok(BootstrapCi { level, mu_eff: mu, lambda0_hat: l0, lambda1_hat: l1 })
}

fn check_level<F: Scalar>(level: F) -> Result<(), InferenceError> {
    if level > F::zero() && level < F::one() {
        Ok(())
    } else {
        Err(InferenceError::InvalidLevel { level: level.as_f64() })
    }
}

fn percentile_interval<F: Scalar>(mut values: Vec<F>, level: F) -> Interval<F> {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite estimates"));
    let tail = (F::one() - level) / F::lit(2.0);
    Interval { lo: quantile_sorted(&values, tail), hi: quantile_sorted(&values, F::one() - tail) }
}

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted data.
pub fn quantile_sorted<F: Scalar>(sorted: &[F], q: F) -> F {
    let h = F::from_count(sorted.len() as u64 - 1) * q;
    let lo = h.floor();
    let i = lo.to_usize().unwrap_or(0).min(sorted.len() - 1);
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (h - lo) * (sorted[j] - sorted[i])
}

/// Bootstrap over patients: each resample of `observations` is estimated on its own and
/// the interval is taken over those estimates. Resamples that turn out inadmissible are
/// skipped and counted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservationBootstrap {
    pub ci: BootstrapCi<f64>,
    pub resamples: usize,
    pub inadmissible: usize,
}

pub fn bootstrap_observations(
    observations: &[Observation<f64>],
    n: u64,
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<ObservationBootstrap, InferenceError> {
    sample_means(observations)?;
    if resamples == 0 {
        return Err(InferenceError::NonPositiveCount { what: "resamples" });
    }
    check_level(level)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut estimates = Vec::with_capacity(resamples);
    let mut draw = Vec::with_capacity(observations.len());
    for _ in 0..resamples {
        draw.clear();
        draw.extend((0..observations.len()).map(|_| observations[rng.gen_range(0..observations.len())]));
        if let Ok(e) = estimate(&draw, n) {
            estimates.push(e);
        }
    }
    let inadmissible = resamples - estimates.len();
    if estimates.is_empty() {
        return Err(InferenceError::Inadmissible {
            reason: "every bootstrap resample",
            clone_count: f64::NAN,
            simpson: f64::NAN,
            gamma: f64::NAN,
        });
    }
    let col = |f: fn(&EstimateTriple<f64>) -> f64| percentile_interval(estimates.iter().map(f).collect(), level);
    let ci = BootstrapCi {
        level,
        mu_eff: col(|e| e.mu_eff),
        lambda0_hat: col(|e| e.lambda0_hat),
        lambda1_hat: col(|e| e.lambda1_hat),
    };
    Ok(ObservationBootstrap { ci, resamples, inadmissible })
}

/// Reads `clone_count,simpson,gamma` rows.
pub fn read_observations<R: Read>(input: R) -> Result<Vec<Observation<f64>>, InferenceError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let rows = reader.deserialize().collect::<Result<Vec<Observation<f64>>, _>>()?;
    for (index, o) in rows.iter().enumerate() {
        check_observation(o).map_err(|reason| InferenceError::InvalidObservation { index, reason })?;
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterRow {
    pub parameter: &'static str,
    pub truth: f64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub bias: f64,
    pub relative_bias: f64,
}

/// Result of repeated estimation on simulated cohorts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationTable {
    pub rows: Vec<ParameterRow>,
    pub estimates: Vec<EstimateTriple<f64>>,
    pub ci: BootstrapCi<f64>,
    pub m: usize,
    pub num_estimates: usize,
    pub master_seed: u64,
    /// Runs excluded because they never recurred before the censoring horizon.
    pub censored: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentOptions {
    pub resamples: usize,
    pub level: f64,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions { resamples: 100, level: 0.95 }
    }
}

/// Simulates `num_estimates` cohorts of `m` patients run to recurrence, estimates each
/// cohort, and bootstraps the estimates.
pub fn estimation_experiment(
    params: &ValidParams<f64>,
    m: usize,
    num_estimates: usize,
    seed: u64,
    options: &ExperimentOptions,
) -> Result<EstimationTable, InferenceError> {
    if m == 0 {
        return Err(InferenceError::NonPositiveCount { what: "M" });
    }
    if num_estimates == 0 {
        return Err(InferenceError::NonPositiveCount { what: "num_estimates" });
    }
    check_level(options.level)?;
    let ensemble = run_ensemble(
        params,
        StopRule::RecurrenceThreshold,
        m * num_estimates,
        seed,
        None,
        &EnsembleOptions::default(),
    )?;
    let estimates = ensemble
        .outcomes
        .par_chunks(m)
        .enumerate()
        .map(|(batch, runs)| {
            let obs: Vec<_> = runs.iter().filter_map(Observation::from_outcome).collect();
            if obs.is_empty() {
                return Err(InferenceError::AllCensored { batch });
            }
            estimate(&obs, params.n()).map_err(|e| InferenceError::Batch { batch, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ci = bootstrap_ci(&estimates, options.resamples, options.level, seed)?;
    let k = estimates.len() as f64;
    let mean = |f: fn(&EstimateTriple<f64>) -> f64| estimates.iter().map(f).sum::<f64>() / k;
    let row = |parameter, truth: f64, estimate: f64, ci: Interval<f64>| ParameterRow {
        parameter,
        truth,
        estimate,
        ci_lo: ci.lo,
        ci_hi: ci.hi,
        bias: estimate - truth,
        relative_bias: (estimate - truth) / truth.abs(),
    };
    let rows = vec![
        row("mu_eff", params.mutation_rate_per_cell(), mean(|e| e.mu_eff), ci.mu_eff),
        row("lambda0", params.lambda0(), mean(|e| e.lambda0_hat), ci.lambda0_hat),
        row("lambda1", params.lambda1(), mean(|e| e.lambda1_hat), ci.lambda1_hat),
    ];
    Ok(EstimationTable {
        rows,
        estimates,
        ci,
        m,
        num_estimates,
        master_seed: seed,
        censored: ensemble.censored,
    })
}
