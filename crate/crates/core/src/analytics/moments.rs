use super::AnalyticsError;
use crate::scalar::Scalar;

/// Value of a moment generating function that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mgf<F> {
    Finite(F),
    Infinite,
}

impl<F: Scalar> Mgf<F> {
    pub fn finite(self) -> Option<F> {
        match self {
            Mgf::Finite(v) => Some(v),
            Mgf::Infinite => None,
        }
    }
}

/// `log((r1 exp(l1 t) - d1) / (r1 exp(l1 t) - r1))`: the MGF of a birth-death process
/// started from one cell is finite exactly for `theta` below this value.
pub fn mgf_span_boundary<F: Scalar>(r1: F, d1: F, t: F) -> F {
    let growth = r1 * ((r1 - d1) * t).exp();
    ((growth - d1) / (growth - r1)).ln()
}

/// `E exp(theta Z(t))` for a birth-death process with rates `r1 > d1` and `Z(0) = 1`.
pub fn mgf_birth_death<F: Scalar>(r1: F, d1: F, t: F, theta: F) -> Result<Mgf<F>, AnalyticsError> {
    if !(t > F::zero()) {
        return Err(AnalyticsError::NonPositiveTime { quantity: "mgf_birth_death", t: t.as_f64() });
    }
    if theta >= mgf_span_boundary(r1, d1, t) {
        return Ok(Mgf::Infinite);
    }
    let decay = (-(r1 - d1) * t).exp();
    let e_theta_m1 = theta.exp_m1();
    let tail = decay * (r1 * theta.exp() - d1);
    Ok(Mgf::Finite((d1 * e_theta_m1 - tail) / (r1 * e_theta_m1 - tail)))
}

/// `E[Z(t)^k]` for a pure-birth (Yule) clone of rate `lambda1` started from one cell.
pub fn yule_moment<F: Scalar>(lambda1: F, t: F, k: u32) -> Result<F, AnalyticsError> {
    let q = (-lambda1 * t).exp();
    let lit = F::lit;
    let poly = match k {
        1 => F::one(),
        2 => lit(2.0) - q,
        3 => lit(6.0) - lit(6.0) * q + q * q,
        4 => lit(24.0) - lit(36.0) * q + lit(14.0) * q * q - q * q * q,
        _ => return Err(AnalyticsError::UnsupportedMoment { k }),
    };
    Ok((F::from_count(k as u64) * lambda1 * t).exp() * poly)
}
