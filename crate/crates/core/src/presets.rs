//! Parameter sets behind the `table1`, `fig1` and `fig2` recipes.

use crate::model::{ModelParams, SensitiveMode, ValidParams};

/// Early-recurrence margin used for the clone-count histograms.
pub const FIG1_Y: f64 = 1.0;
pub const FIG1_REPLICATES: usize = 10_000;

/// Margins for the conditional Simpson's Index curve: `0, 0.05, ..., 3`.
pub fn fig2_grid() -> Vec<f64> {
    (0..=60).map(|i| i as f64 * 0.05).collect()
}

/// General model: stochastic sensitive cells and birth-death clones
/// (`r0 = 1, d0 = 1.2, r1 = 1, d1 = 0.8, mu = 0.5, alpha = 0.6, n = 1000, a = 1`).
pub fn fig1() -> ValidParams<f64> {
    ModelParams {
        r0: 1.0,
        d0: 1.2,
        r1: 1.0,
        d1: 0.8,
        mu: 0.5,
        alpha: 0.6,
        n: 1000,
        a: 1.0,
        sensitive_mode: SensitiveMode::Stochastic,
    }
    .validate()
    .expect("preset is valid")
}

/// Base model: deterministic sensitive decay and pure-birth clones with the same net
/// rates as [`fig1`] (`lambda0 = -0.2`, `lambda1 = 0.2`).
pub fn base(n: u64) -> ValidParams<f64> {
    ModelParams {
        r0: 1.0,
        d0: 1.2,
        r1: 0.2,
        d1: 0.0,
        mu: 0.5,
        alpha: 0.6,
        n,
        a: 1.0,
        sensitive_mode: SensitiveMode::Deterministic,
    }
    .validate()
    .expect("preset is valid")
}

/// Estimation experiment: base model at `n = 100000`, so `mu n^-alpha = 5e-4`.
pub fn table1() -> ValidParams<f64> {
    base(100_000)
}
