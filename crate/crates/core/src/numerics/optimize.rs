use super::{NumericsError, Tolerances};
use crate::scalar::Scalar;

/// Which end of the search interval the maximum collapsed onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum<F> {
    pub argmax: F,
    pub value: F,
    /// Set when the bracket never left one endpoint; `argmax` is then that endpoint.
    pub boundary: Option<Boundary>,
    pub iterations: usize,
}

/// Golden-section search for the maximum of a unimodal `h` on the open interval `(lo, hi)`.
///
/// Only interior points are evaluated during the search. If the bracket shrinks onto an
/// endpoint, that endpoint is returned with a [`Boundary`] flag and its value when `h` is
/// finite there (otherwise the value at the closest interior probe).
pub fn maximize_1d<F, H>(h: H, lo: F, hi: F, tol: &Tolerances<F>) -> Result<Maximum<F>, NumericsError>
where
    F: Scalar,
    H: Fn(F) -> F,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(NumericsError::InvalidInterval { lo: lo.as_f64(), hi: hi.as_f64() });
    }
    let eval = |x: F| {
        let v = h(x);
        if v.is_nan() {
            Err(NumericsError::NonFinite { op: "maximize_1d", at: x.as_f64() })
        } else {
            Ok(v)
        }
    };
    let ratio = (F::lit(5.0).sqrt() - F::one()) / F::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    let mut iterations = 0;
    while b - a > tol.opt_abs {
        if iterations == tol.max_iter {
            return Err(NumericsError::MaxIterations { op: "maximize_1d", iterations });
        }
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = eval(d)?;
        }
    }
    let (x_in, f_in) = if fc >= fd { (c, fc) } else { (d, fd) };
    let boundary = if a == lo {
        Some(Boundary::Lower)
    } else if b == hi {
        Some(Boundary::Upper)
    } else {
        None
    };
    let (argmax, value) = match boundary {
        Some(side) => {
            let end = if side == Boundary::Lower { lo } else { hi };
            let v = h(end);
            (end, if v.is_finite() { v } else { f_in })
        }
        None => (x_in, f_in),
    };
    Ok(Maximum { argmax, value, boundary, iterations })
}

/// Best value of `h` over the `points + 1` equally spaced nodes of `[lo, hi]`,
/// skipping nodes where `h` is not finite. Returns `None` if no node is finite.
pub fn grid_scan_max<F, H>(h: H, lo: F, hi: F, points: usize) -> Option<(F, F)>
where
    F: Scalar,
    H: Fn(F) -> F,
{
    let step = (hi - lo) / F::from_count(points.max(1) as u64);
    (0..=points)
        .map(|i| {
            let x = lo + step * F::from_count(i as u64);
            (x, h(x))
        })
        .filter(|(_, v)| v.is_finite())
        .fold(None, |best: Option<(F, F)>, (x, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((x, v)),
        })
}
