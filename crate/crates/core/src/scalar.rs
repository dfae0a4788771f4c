//! Floating-point abstraction shared by the deterministic parts of the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar used by numerics, analytics and inference: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts an unsigned count.
    #[inline]
    fn from_count(k: u64) -> Self {
        Self::from_u64(k).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `ln(k!)`, exact summation for small `k`, Stirling series beyond.
pub fn ln_factorial<F: Scalar>(k: u64) -> F {
    if k < 2 {
        return F::zero();
    }
    if k <= 256 {
        return (2..=k).fold(F::zero(), |acc, i| acc + F::from_count(i).ln());
    }
    let x = F::from_count(k) + F::one();
    // ln Γ(x) for x > 257; the truncated series is accurate far below f64 epsilon there.
    let inv = x.recip();
    let inv2 = inv * inv;
    let series = inv
        * (F::lit(1.0 / 12.0)
            - inv2 * (F::lit(1.0 / 360.0) - inv2 * (F::lit(1.0 / 1260.0) - inv2 * F::lit(1.0 / 1680.0))));
    (x - F::lit(0.5)) * x.ln() - x + F::lit(0.5) * (F::TAU()).ln() + series
}
