//! Scalar numerics behind every closed form: quadrature on finite and half-infinite
//! ranges, bracketed root finding and bounded 1-D maximization.

mod optimize;
mod quadrature;
mod root;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use optimize::{grid_scan_max, maximize_1d, Boundary, Maximum};
pub use quadrature::{integrate, integrate_0_inf};
pub use root::{find_root_monotone, RootResult};

/// Convergence controls shared by the numerical routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances<F> {
    /// Relative accuracy target for quadrature.
    pub quad_rel: F,
    /// Absolute bracket width for root finding.
    pub root_abs: F,
    /// Absolute argument tolerance for maximization.
    pub opt_abs: F,
    /// Iteration cap; also caps quadrature recursion depth (see [`integrate`]).
    pub max_iter: usize,
}

impl<F: Scalar> Default for Tolerances<F> {
    fn default() -> Self {
        Tolerances {
            quad_rel: F::lit(1e-10),
            root_abs: F::lit(1e-12),
            opt_abs: F::lit(1e-10),
            max_iter: 200,
        }
    }
}

impl<F: Scalar> Tolerances<F> {
    pub fn validate(self) -> Result<Self, NumericsError> {
        let positive = |x: F| x.is_finite() && x > F::zero();
        if positive(self.quad_rel) && positive(self.root_abs) && positive(self.opt_abs) && self.max_iter >= 1 {
            Ok(self)
        } else {
            Err(NumericsError::InvalidTolerances)
        }
    }

    /// Same tolerances with a stricter quadrature target.
    pub fn with_quad_rel(self, quad_rel: F) -> Self {
        Tolerances { quad_rel, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("tolerances must be strictly positive and max_iter >= 1")]
    InvalidTolerances,
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("no sign change on bracket: g({lo}) = {g_lo}, g({hi}) = {g_hi}")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
    #[error("{op} did not converge within {iterations} iterations")]
    MaxIterations { op: &'static str, iterations: usize },
    #[error("quadrature did not reach the requested accuracy on [{lo}, {hi}]")]
    QuadratureNotConverged { lo: f64, hi: f64 },
    #[error("{op}: non-finite function value at {at}")]
    NonFinite { op: &'static str, at: f64 },
}
