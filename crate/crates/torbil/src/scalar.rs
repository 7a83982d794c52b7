//! Floating-point abstraction shared by every module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the geometry is generic over. Implemented for `f32` and `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal. Every tolerance in the crate goes through here.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Wraps `x` into `[a, a + period)`.
#[inline]
pub fn wrap_into<T: Scalar>(x: T, a: T, period: T) -> T {
    let mut y = (x - a) % period;
    if y < T::zero() {
        y += period;
    }
    if y >= period {
        y -= period;
    }
    a + y
}

/// Shifts `angle` by a multiple of 2π so that it lands nearest to `hint`.
#[inline]
pub fn nearest_branch<T: Scalar>(angle: T, hint: T) -> T {
    let tau = T::TAU();
    angle + tau * ((hint - angle) / tau).round()
}
