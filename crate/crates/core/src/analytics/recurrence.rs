use super::{check_y, AnalyticsError, Named};
use crate::model::ValidParams;
use crate::numerics::{find_root_monotone, integrate_0_inf, maximize_1d, Boundary, Tolerances};
use crate::scalar::Scalar;

/// Doublings tried when growing the bracket for `zeta` or `theta_star`.
const BRACKET_STEPS: usize = 64;

/// Mean resistant population `E Z1(t)`.
pub fn z1_mean<F: Scalar>(p: &ValidParams<F>, t: F) -> F {
    let (l0, l1) = (p.lambda0(), p.lambda1());
    p.mu() / (l1 - l0) * p.diversity_scale() * (l1 * t).exp() * -((l0 - l1) * t).exp_m1()
}

/// Deterministic recurrence proxy: the unique `t` with `z1_mean(t) = a n`.
pub fn zeta<F: Scalar>(p: &ValidParams<F>, tol: &Tolerances<F>) -> Result<F, AnalyticsError> {
    let target = p.threshold();
    let g = |t: F| z1_mean(p, t) - target;
    let mut hi = F::one();
    for _ in 0..BRACKET_STEPS {
        if g(hi) >= F::zero() {
            return find_root_monotone(g, F::zero(), hi, tol).named("zeta").map(|r| r.root);
        }
        hi = hi + hi;
    }
    Err(AnalyticsError::ZetaBracket { t_max: hi.as_f64() })
}

/// `int_0^inf exp((l0 - l1) s) / (1 - theta exp(-l1 s))^k ds`, the building block of the
/// tilt equation (`k = 2`) and the rate objective (`k = 1`).
pub(crate) fn tilted_integral<F: Scalar>(
    p: &ValidParams<F>,
    theta: F,
    power: i32,
    tol: &Tolerances<F>,
) -> Result<F, crate::numerics::NumericsError> {
    let (l0, l1) = (p.lambda0(), p.lambda1());
    integrate_0_inf(|s| ((l0 - l1) * s).exp() / (F::one() - theta * (-l1 * s).exp()).powi(power), l1, tol)
}

/// The tilt `theta*(y)` in `[0, 1)` solving
/// `exp(l1 y) / (l1 - l0) = int_0^inf exp(l1 s) exp(l0 s) / (exp(l1 s) - theta)^2 ds`.
pub fn theta_star<F: Scalar>(p: &ValidParams<F>, y: F, tol: &Tolerances<F>) -> Result<F, AnalyticsError> {
    check_y(y, "theta_star")?;
    if y == F::zero() {
        return Ok(F::zero());
    }
    let lhs = (p.lambda1() * y).exp() / (p.lambda1() - p.lambda0());
    let g = |theta: F| tilted_integral(p, theta, 2, tol).map(|v| v - lhs);
    let mut gap = F::lit(0.5);
    for _ in 0..BRACKET_STEPS {
        let hi = F::one() - gap;
        if g(hi).named("theta_star")? > F::zero() {
            // Quadrature failures inside the solver surface as NaN and abort it.
            let solve = |theta: F| g(theta).unwrap_or(F::nan());
            return find_root_monotone(solve, F::zero(), hi, tol).named("theta_star").map(|r| r.root);
        }
        gap = gap / F::lit(2.0);
        if gap < F::epsilon() {
            break;
        }
    }
    Err(AnalyticsError::ThetaStarUnbounded { y: y.as_f64() })
}

/// Objective whose supremum over `theta in (0, 1)` is the large-deviations rate `L(y)`:
/// `mu theta exp(y l1) / (l1 - l0) - mu theta int_0^inf exp(l0 s) / (exp(l1 s) - theta) ds`.
pub fn ld_objective<F: Scalar>(p: &ValidParams<F>, theta: F, y: F, tol: &Tolerances<F>) -> Result<F, AnalyticsError> {
    let (l0, l1) = (p.lambda0(), p.lambda1());
    let integral = tilted_integral(p, theta, 1, tol).named("ld_rate")?;
    Ok(p.mu() * theta * ((y * l1).exp() / (l1 - l0) - integral))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdRate<F> {
    /// `L(y) >= 0`; the early-recurrence probability decays like `exp(-n^(1-alpha) L(y))`.
    pub rate: F,
    /// Maximizing tilt found by the optimizer.
    pub argmax: F,
}

/// Large-deviations rate of `{gamma_n <= zeta_n - y}` by golden-section maximization.
///
/// The maximizer must agree with [`theta_star`] to `1e-6`.
pub fn ld_rate<F: Scalar>(p: &ValidParams<F>, y: F, tol: &Tolerances<F>) -> Result<LdRate<F>, AnalyticsError> {
    check_y(y, "ld_rate")?;
    // Golden section compares nearly equal values near the optimum; quadrature noise
    // there must sit well below the resolution the argmax check needs.
    let inner = tol.with_quad_rel((tol.quad_rel * F::lit(1e-3)).max(F::epsilon() * F::lit(16.0)));
    let objective = |theta: F| ld_objective(p, theta, y, &inner).unwrap_or(F::nan());
    let max = maximize_1d(objective, F::zero(), F::one(), tol).named("ld_rate")?;
    if max.boundary == Some(Boundary::Upper) {
        return Err(AnalyticsError::UpperBoundary { y: y.as_f64() });
    }
    let theta = theta_star(p, y, tol)?;
    if (max.argmax - theta).abs() > F::lit(1e-6) {
        return Err(AnalyticsError::FirstOrderMismatch { argmax: max.argmax.as_f64(), theta_star: theta.as_f64() });
    }
    #[cfg(debug_assertions)]
    {
        if let Some((_, grid_best)) = crate::numerics::grid_scan_max(objective, F::zero(), F::lit(0.999), 200) {
            debug_assert!(grid_best <= max.value + F::lit(1e-9), "grid scan beat golden section");
        }
    }
    Ok(LdRate { rate: max.value.max(F::zero()), argmax: max.argmax })
}
