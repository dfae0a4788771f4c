//! Simulation and asymptotic analysis of clonal diversity at cancer recurrence in a
//! two-type branching process: a decaying drug-sensitive population seeds
//! drug-resistant clones that grow until the resistant count first exceeds `a n`.
//!
//! - [`model`]: parameters, validation, outcome records
//! - [`numerics`]: quadrature, root finding, 1-D maximization
//! - [`simulate`]: exact event-driven trajectories, ensembles, rejection conditioning
//! - [`analytics`]: limits of clone counts, Simpson's Index, large-deviations rates
//! - [`inference`]: method-of-moments estimators with bootstrap intervals
//!
//! The deterministic modules are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the double-precision types used by simulation and the command line.

pub mod analytics;
pub mod inference;
pub mod model;
pub mod numerics;
pub mod presets;
pub mod scalar;
pub mod simulate;

pub use scalar::Scalar;

pub type Params = model::ValidParams<f64>;
pub type RawParams = model::ModelParams<f64>;
pub type Tolerances = numerics::Tolerances<f64>;
pub type AnalyticReport = analytics::AnalyticReport<f64>;
pub type Observation = inference::Observation<f64>;
pub type EstimateTriple = inference::EstimateTriple<f64>;
