use super::recurrence::{theta_star, zeta};
use super::{check_y, AnalyticsError, Named};
use crate::model::ValidParams;
use crate::numerics::{integrate, integrate_0_inf, Tolerances};
use crate::scalar::{ln_factorial, Scalar};

/// `lim E[I_n(zeta_n)] / n^(1-alpha) = -mu / lambda0`.
pub fn clones_uncond_limit<F: Scalar>(p: &ValidParams<F>) -> F {
    -p.mu() / p.lambda0()
}

/// Scaled expected clone count given early recurrence by margin `y`:
/// `mu int_0^inf exp(l0 s) / (1 - theta* exp(-l1 s)) ds`.
pub fn clones_cond_limit<F: Scalar>(p: &ValidParams<F>, y: F, tol: &Tolerances<F>) -> Result<F, AnalyticsError> {
    check_y(y, "clones_cond_limit")?;
    clones_cond_limit_at(p, theta_star(p, y, tol)?, tol)
}

/// [`clones_cond_limit`] for a known tilt.
pub fn clones_cond_limit_at<F: Scalar>(p: &ValidParams<F>, theta: F, tol: &Tolerances<F>) -> Result<F, AnalyticsError> {
    let (l0, l1) = (p.lambda0(), p.lambda1());
    // exp(l0 s) only decays at rate -l0, which may be slower than l1.
    let rate = l1.min(-l0);
    let integral =
        integrate_0_inf(|s| (l0 * s).exp() / (F::one() - theta * (-l1 * s).exp()), rate, tol).named("clones_cond_limit")?;
    Ok(p.mu() * integral)
}

/// `lim n^(1-alpha) E[R_n] = 2 (l1 - l0)^2 / (mu (2 l1 - l0))`.
pub fn simpson_uncond_limit<F: Scalar>(p: &ValidParams<F>) -> F {
    let (l0, l1) = (p.lambda0(), p.lambda1());
    let two = F::lit(2.0);
    two * (l1 - l0).powi(2) / (p.mu() * (two * l1 - l0))
}

/// Scaled Simpson's Index limit at `zeta_n - y` given early recurrence:
/// `2 (l1 - l0)^2 / mu * exp(-2 l1 y) * int_0^inf exp(-(2 l1 - l0) s) / (1 - theta* exp(-l1 s))^3 ds`.
pub fn simpson_cond_limit<F: Scalar>(p: &ValidParams<F>, y: F, tol: &Tolerances<F>) -> Result<F, AnalyticsError> {
    check_y(y, "simpson_cond_limit")?;
    simpson_cond_limit_at(p, y, theta_star(p, y, tol)?, tol)
}

/// [`simpson_cond_limit`] for a known tilt.
pub fn simpson_cond_limit_at<F: Scalar>(
    p: &ValidParams<F>,
    y: F,
    theta: F,
    tol: &Tolerances<F>,
) -> Result<F, AnalyticsError> {
    let (l0, l1) = (p.lambda0(), p.lambda1());
    let two = F::lit(2.0);
    let integral = integrate_0_inf(
        |s| (-(two * l1 - l0) * s).exp() / (F::one() - theta * (-l1 * s).exp()).powi(3),
        l1,
        tol,
    )
    .named("simpson_cond_limit")?;
    Ok(two * (l1 - l0).powi(2) / p.mu() * (-two * l1 * y).exp() * integral)
}

/// Conditional inflation factors for a birth window `(t1, t2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowConstants<F> {
    /// Mutant mass descended from the window is inflated by `1 + delta_star`.
    pub delta_star: F,
    /// Clones born in the window are inflated by `1 + kappa_star`.
    pub kappa_star: F,
    /// `t2 - t1 < ln(2 - theta*) / l1`, the window length under which the clone count
    /// concentrates at `1 + kappa_star`.
    pub kappa_valid: bool,
}

pub fn window_constants<F: Scalar>(
    p: &ValidParams<F>,
    y: F,
    t1: F,
    t2: F,
    tol: &Tolerances<F>,
) -> Result<WindowConstants<F>, AnalyticsError> {
    check_y(y, "window_constants")?;
    window_constants_at(p, theta_star(p, y, tol)?, t1, t2, tol)
}

/// [`window_constants`] for a known tilt.
pub fn window_constants_at<F: Scalar>(
    p: &ValidParams<F>,
    theta: F,
    t1: F,
    t2: F,
    tol: &Tolerances<F>,
) -> Result<WindowConstants<F>, AnalyticsError> {
    if !(t1 >= F::zero() && t1 < t2 && t2.is_finite()) {
        return Err(AnalyticsError::InvalidWindow { t1: t1.as_f64(), t2: t2.as_f64() });
    }
    let (l0, l1) = (p.lambda0(), p.lambda1());
    let kappa_valid = t2 - t1 < (F::lit(2.0) - theta).ln() / l1;
    if theta == F::zero() {
        return Ok(WindowConstants { delta_star: F::zero(), kappa_star: F::zero(), kappa_valid });
    }
    let tilt = |s: F| F::one() / (F::one() - theta * (-l1 * s).exp());
    let mass = integrate(|s| ((l0 - l1) * s).exp() * tilt(s).powi(2), t1, t2, tol).named("delta_star")?;
    let count = integrate(|s| (l0 * s).exp() * tilt(s), t1, t2, tol).named("kappa_star")?;
    let width = t2 - t1;
    // int_{t1}^{t2} exp(-c s) ds without cancellation for short windows.
    let exp_window = |c: F| -(-c * t1).exp() * (-c * width).exp_m1() / c;
    let delta_star = mass / exp_window(l1 - l0) - F::one();
    let kappa_star = count / exp_window(-l0) - F::one();
    Ok(WindowConstants { delta_star, kappa_star, kappa_valid })
}

/// Unconditional mean number of clones born in `(t1, t2)`: `mu n^(1-alpha) int_{t1}^{t2} exp(l0 t) dt`.
pub fn window_mean_clones<F: Scalar>(p: &ValidParams<F>, t1: F, t2: F) -> F {
    p.cumulative_mutation_intensity(t2) - p.cumulative_mutation_intensity(t1)
}

/// Mean of the Poisson law of `I_n(zeta_n)`: `-(mu n^(1-alpha) / l0) (1 - exp(l0 zeta_n))`.
pub fn poisson_mean<F: Scalar>(p: &ValidParams<F>, tol: &Tolerances<F>) -> Result<F, AnalyticsError> {
    Ok(p.cumulative_mutation_intensity(zeta(p, tol)?))
}

/// `P(I_n(zeta_n) = k)`, evaluated in log space.
pub fn poisson_clone_pmf<F: Scalar>(p: &ValidParams<F>, k: u64, tol: &Tolerances<F>) -> Result<F, AnalyticsError> {
    Ok(poisson_pmf(poisson_mean(p, tol)?, k))
}

pub fn poisson_pmf<F: Scalar>(mean: F, k: u64) -> F {
    if mean == F::zero() {
        return if k == 0 { F::one() } else { F::zero() };
    }
    (F::from_count(k) * mean.ln() - mean - ln_factorial::<F>(k)).exp()
}
