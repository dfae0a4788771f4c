//! Closed-form and quadrature-backed limits of the model.
//!
//! Everything here is deterministic and generic over [`Scalar`]. The tilt parameter
//! `theta_star(y)` is the hinge: it is found by root-finding on its defining
//! integral equation and then feeds the conditional clone-count, window and
//! Simpson's Index limits. The large-deviations optimizer is run independently and
//! its maximizer is checked against it.

mod limits;
mod moments;
mod recurrence;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::{SensitiveMode, ValidParams};
use crate::numerics::{NumericsError, Tolerances};
use crate::scalar::Scalar;

pub use limits::{
    clones_cond_limit, clones_cond_limit_at, clones_uncond_limit, poisson_clone_pmf, poisson_mean, poisson_pmf,
    simpson_cond_limit, simpson_cond_limit_at, simpson_uncond_limit, window_constants, window_constants_at,
    window_mean_clones, WindowConstants,
};
pub use moments::{mgf_birth_death, mgf_span_boundary, yule_moment, Mgf};
pub use recurrence::{ld_objective, ld_rate, theta_star, z1_mean, zeta, LdRate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("{quantity}: {source}")]
    Numerics {
        quantity: &'static str,
        #[source]
        source: NumericsError,
    },
    #[error("{quantity}: y = {y} must be >= 0")]
    NegativeY { quantity: &'static str, y: f64 },
    #[error("zeta: z1 mean never reached a*n before t = {t_max}")]
    ZetaBracket { t_max: f64 },
    #[error("theta_star: no root below 1 for y = {y}")]
    ThetaStarUnbounded { y: f64 },
    #[error("ld_rate: optimizer collapsed onto theta = 1 for y = {y}")]
    UpperBoundary { y: f64 },
    #[error("ld_rate: maximizer {argmax} disagrees with theta_star {theta_star}")]
    FirstOrderMismatch { argmax: f64, theta_star: f64 },
    #[error("window ({t1}, {t2}) must satisfy 0 <= t1 < t2")]
    InvalidWindow { t1: f64, t2: f64 },
    #[error("{quantity}: t = {t} must be > 0")]
    NonPositiveTime { quantity: &'static str, t: f64 },
    #[error("yule_moment: order {k} not in 1..=4")]
    UnsupportedMoment { k: u32 },
}

pub(crate) trait Named<T> {
    fn named(self, quantity: &'static str) -> Result<T, AnalyticsError>;
}

impl<T> Named<T> for Result<T, NumericsError> {
    fn named(self, quantity: &'static str) -> Result<T, AnalyticsError> {
        self.map_err(|source| AnalyticsError::Numerics { quantity, source })
    }
}

pub(crate) fn check_y<F: Scalar>(y: F, quantity: &'static str) -> Result<(), AnalyticsError> {
    if y >= F::zero() {
        Ok(())
    } else {
        Err(AnalyticsError::NegativeY { quantity, y: y.as_f64() })
    }
}

/// Window limits as they appear in a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowReport<F: Scalar> {
    #[serde(serialize_with = "sig12")]
    pub t1: F,
    #[serde(serialize_with = "sig12")]
    pub t2: F,
    #[serde(serialize_with = "sig12")]
    pub delta_star: F,
    #[serde(serialize_with = "sig12")]
    pub kappa_star: F,
    /// Whether the window is short enough for the clone-count concentration result.
    pub kappa_valid: bool,
}

/// Every limit constant for one parameter set and early-recurrence margin `y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticReport<F: Scalar> {
    #[serde(serialize_with = "sig12")]
    pub y: F,
    #[serde(serialize_with = "sig12")]
    pub zeta: F,
    #[serde(serialize_with = "sig12")]
    pub theta_star: F,
    #[serde(serialize_with = "sig12")]
    pub ld_rate: F,
    #[serde(serialize_with = "sig12")]
    pub poisson_mean: F,
    #[serde(serialize_with = "sig12")]
    pub clones_uncond_limit: F,
    #[serde(serialize_with = "sig12")]
    pub clones_cond_limit: F,
    #[serde(serialize_with = "sig12")]
    pub simpson_uncond_limit: F,
    #[serde(serialize_with = "sig12")]
    pub simpson_cond_limit: F,
    pub windows: Vec<WindowReport<F>>,
    /// Deterministic sensitive cells and pure-birth clones; the conditional Simpson
    /// limit is only established for this case.
    pub base_model: bool,
}

/// Assembles an [`AnalyticReport`] for margin `y` and the given windows.
pub fn analyze<F: Scalar>(
    p: &ValidParams<F>,
    y: F,
    windows: &[(F, F)],
    tol: &Tolerances<F>,
) -> Result<AnalyticReport<F>, AnalyticsError> {
    check_y(y, "analyze")?;
    let theta = theta_star(p, y, tol)?;
    let ld = ld_rate(p, y, tol)?;
    let windows = windows
        .iter()
        .map(|&(t1, t2)| {
            let w = window_constants_at(p, theta, t1, t2, tol)?;
            Ok(WindowReport { t1, t2, delta_star: w.delta_star, kappa_star: w.kappa_star, kappa_valid: w.kappa_valid })
        })
        .collect::<Result<Vec<_>, AnalyticsError>>()?;
    Ok(AnalyticReport {
        y,
        zeta: zeta(p, tol)?,
        theta_star: theta,
        ld_rate: ld.rate,
        poisson_mean: poisson_mean(p, tol)?,
        clones_uncond_limit: clones_uncond_limit(p),
        clones_cond_limit: clones_cond_limit_at(p, theta, tol)?,
        simpson_uncond_limit: simpson_uncond_limit(p),
        simpson_cond_limit: simpson_cond_limit_at(p, y, theta, tol)?,
        windows,
        base_model: p.mode() == SensitiveMode::Deterministic && p.raw().d1 == F::zero(),
    })
}

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn sig12<F: Scalar, S: Serializer>(x: &F, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig12(x.as_f64()))
}
