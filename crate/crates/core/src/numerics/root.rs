use super::{NumericsError, Tolerances};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult<F> {
    pub root: F,
    /// Final bracket; `g` has opposite signs (or a zero) at its endpoints.
    pub lo: F,
    pub hi: F,
    pub iterations: usize,
}

/// Brent's method: bisection safeguarded with secant and inverse quadratic steps.
///
/// Stops once the bracket is narrower than `root_abs` plus a few ulps of the root.
pub fn find_root_monotone<F, G>(g: G, lo: F, hi: F, tol: &Tolerances<F>) -> Result<RootResult<F>, NumericsError>
where
    F: Scalar,
    G: Fn(F) -> F,
{
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(NumericsError::InvalidInterval { lo: lo.as_f64(), hi: hi.as_f64() });
    }
    let eval = |x: F| {
        let v = g(x);
        if v.is_nan() {
            Err(NumericsError::NonFinite { op: "find_root_monotone", at: x.as_f64() })
        } else {
            Ok(v)
        }
    };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (eval(a)?, eval(b)?);
    if fa == F::zero() {
        return Ok(RootResult { root: a, lo: a, hi: a, iterations: 0 });
    }
    if fb == F::zero() {
        return Ok(RootResult { root: b, lo: b, hi: b, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            g_lo: fa.as_f64(),
            g_hi: fb.as_f64(),
        });
    }

    let two = F::lit(2.0);
    let three = F::lit(3.0);
    let half = F::lit(0.5);
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for iter in 1..=tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * F::epsilon() * b.abs() + half * tol.root_abs;
        let xm = half * (c - b);
        if fb == F::zero() {
            return Ok(RootResult { root: b, lo: b, hi: b, iterations: iter });
        }
        if xm.abs() <= tol1 {
            let (l, h) = if b < c { (b, c) } else { (c, b) };
            return Ok(RootResult { root: b, lo: l, hi: h, iterations: iter });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = F::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qa * (qa - r) - (b - a) * (r - F::one()));
                q = (qa - F::one()) * (r - F::one()) * (s - F::one());
            }
            if p > F::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 { b + d } else { b + tol1 * xm.signum() };
        fb = eval(b)?;
    }
    Err(NumericsError::MaxIterations { op: "find_root_monotone", iterations: tol.max_iter })
}
