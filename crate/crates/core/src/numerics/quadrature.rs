use super::{NumericsError, Tolerances};
use crate::scalar::Scalar;

/// Panels evaluated before adaptive refinement starts; keeps sharply peaked
/// integrands from being accepted on a coarse first estimate.
const INITIAL_PANELS: usize = 32;
/// Recursion never goes deeper than this regardless of `max_iter`.
const DEPTH_LIMIT: usize = 50;

/// Adaptive Simpson quadrature of `g` over `[a, b]`.
///
/// The absolute error budget is `quad_rel` times the magnitude of a first-pass
/// estimate, split across panels in proportion to width. Recursion depth is
/// capped at `min(max_iter, 50)`; reaching the cap with the local error still
/// over budget is an error.
pub fn integrate<F, G>(g: G, a: F, b: F, tol: &Tolerances<F>) -> Result<F, NumericsError>
where
    F: Scalar,
    G: Fn(F) -> F,
{
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(NumericsError::InvalidInterval { lo: a.as_f64(), hi: b.as_f64() });
    }
    if a == b {
        return Ok(F::zero());
    }
    let eval = |x: F| -> Result<F, NumericsError> {
        let v = g(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFinite { op: "integrate", at: x.as_f64() })
        }
    };

    let two = F::lit(2.0);
    let width = (b - a) / F::from_count(INITIAL_PANELS as u64);
    let mut panels = Vec::with_capacity(INITIAL_PANELS);
    let mut left = a;
    let mut f_left = eval(a)?;
    for i in 0..INITIAL_PANELS {
        let right = if i + 1 == INITIAL_PANELS { b } else { a + width * F::from_count(i as u64 + 1) };
        let mid = (left + right) / two;
        let f_mid = eval(mid)?;
        let f_right = eval(right)?;
        let whole = simpson(left, right, f_left, f_mid, f_right);
        panels.push(Panel { a: left, b: right, fa: f_left, fm: f_mid, fb: f_right, whole });
        left = right;
        f_left = f_right;
    }

    let rough: F = panels.iter().fold(F::zero(), |acc, p| acc + p.whole);
    let scale: F = panels.iter().fold(F::zero(), |acc, p| acc + p.whole.abs());
    let magnitude = if rough.abs() > F::epsilon() * scale { rough.abs() } else { scale };
    let budget = tol.quad_rel * magnitude.max(F::min_positive_value());
    let depth = tol.max_iter.min(DEPTH_LIMIT);

    let mut total = F::zero();
    for p in &panels {
        let eps = budget * (p.b - p.a) / (b - a);
        total = total + refine(&eval, *p, eps, depth)?;
    }
    Ok(total)
}

/// Integral of `f` over `[0, inf)` via the substitution `u = exp(-rate s)`.
///
/// The transformed integrand is `f(-ln(u) / rate) / (rate u)` on `(0, 1]`.
/// For integrands carrying a factor `exp(-c s)` with `c >= rate` it stays
/// bounded at `u = 0`; the endpoint itself is evaluated at the smallest `u`
/// whose preimage is still representable.
pub fn integrate_0_inf<F, G>(f: G, rate: F, tol: &Tolerances<F>) -> Result<F, NumericsError>
where
    F: Scalar,
    G: Fn(F) -> F,
{
    if !(rate.is_finite() && rate > F::zero()) {
        return Err(NumericsError::InvalidInterval { lo: 0.0, hi: f64::INFINITY });
    }
    let u_floor = F::min_positive_value().sqrt();
    let transformed = |u: F| {
        let u = u.max(u_floor);
        let s = -u.ln() / rate;
        let v = f(s);
        if v == F::zero() {
            F::zero()
        } else {
            v / (rate * u)
        }
    };
    integrate(transformed, F::zero(), F::one(), tol)
}

#[derive(Clone, Copy)]
struct Panel<F> {
    a: F,
    b: F,
    fa: F,
    fm: F,
    fb: F,
    whole: F,
}

fn simpson<F: Scalar>(a: F, b: F, fa: F, fm: F, fb: F) -> F {
    (b - a) / F::lit(6.0) * (fa + F::lit(4.0) * fm + fb)
}

fn refine<F, E>(eval: &E, p: Panel<F>, eps: F, depth: usize) -> Result<F, NumericsError>
where
    F: Scalar,
    E: Fn(F) -> Result<F, NumericsError>,
{
    let two = F::lit(2.0);
    let m = (p.a + p.b) / two;
    let lm = (p.a + m) / two;
    let rm = (m + p.b) / two;
    let flm = eval(lm)?;
    let frm = eval(rm)?;
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    let fifteen = F::lit(15.0);
    if delta.abs() <= fifteen * eps || m <= p.a || m >= p.b {
        return Ok(left + right + delta / fifteen);
    }
    if depth == 0 {
        return Err(NumericsError::QuadratureNotConverged { lo: p.a.as_f64(), hi: p.b.as_f64() });
    }
    let half = eps / two;
    let l = refine(eval, Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, half, depth - 1)?;
    let r = refine(eval, Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, half, depth - 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn exponential_integrals_exact() {
        let (l0, l1) = (-0.2f64, 0.2f64);
        let v = integrate_0_inf(|s| ((l0 - l1) * s).exp(), l1, &tol()).unwrap();
        assert!((v - 2.5).abs() < 2.5e-10, "{v}");
        let v = integrate_0_inf(|s| (l0 * s).exp(), l1, &tol()).unwrap();
        assert!((v - 5.0).abs() < 5e-10, "{v}");
    }

    #[test]
    fn tilted_integrand_matches_trapezoid_scan() {
        let (l0, l1, theta) = (-0.2f64, 0.2f64, 0.5f64);
        let f = |s: f64| (l0 * s).exp() / ((l1 * s).exp() - theta);
        let got = integrate_0_inf(f, l1, &tol()).unwrap();
        let h = 1e-4;
        let steps = (200.0 / h) as usize;
        let mut oracle = 0.5 * (f(0.0) + f(200.0));
        for i in 1..steps {
            oracle += f(i as f64 * h);
        }
        oracle *= h;
        assert!(((got - oracle) / oracle).abs() < 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn finite_interval_polynomial_and_empty() {
        let v = integrate(|x: f64| x * x, 0.0, 3.0, &tol()).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        assert_eq!(integrate(|x: f64| x, 1.0, 1.0, &tol()).unwrap(), 0.0);
        assert!(integrate(|x: f64| x, 2.0, 1.0, &tol()).is_err());
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let err = integrate(|x: f64| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, &tol()).unwrap_err();
        assert!(matches!(err, NumericsError::NonFinite { .. }));
    }

    #[test]
    fn depth_cap_reports_non_convergence() {
        let strict = Tolerances { quad_rel: 1e-14, max_iter: 2, ..tol() };
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 1.0, &strict).unwrap_err();
        assert!(matches!(err, NumericsError::QuadratureNotConverged { .. }));
    }

    #[test]
    fn single_precision() {
        let t = Tolerances::<f32> { quad_rel: 1e-6, ..Default::default() };
        let v = integrate_0_inf(|s: f32| (-0.2 * s).exp(), 0.2, &t).unwrap();
        assert!((v - 5.0).abs() < 1e-4);
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn decaying_exponential_to_quad_rel(l0 in -5.0f64..-0.01) {
            let v = integrate_0_inf(|s| (l0 * s).exp(), -l0, &tol()).unwrap();
            let exact = -1.0 / l0;
            prop_assert!(((v - exact) / exact).abs() <= 1e-10);
        }
    }
}
