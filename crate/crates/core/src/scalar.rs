//! Floating point abstraction shared by every solver in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the solvers are generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("usize representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `[x]^+`
#[inline]
pub fn pos<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x
    } else {
        T::zero()
    }
}

/// `2^(2 beta) / 3`, the saturation level of a quantized link.
#[inline]
pub fn theta<T: Scalar>(beta: u32) -> T {
    T::lit(2.0).powi(2 * beta as i32) / T::lit(3.0)
}

/// `a <= b` up to a relative slack of `rel * max(|a|, |b|)`.
#[inline]
pub fn le_rel<T: Scalar>(a: T, b: T, rel: T) -> bool {
    a <= b + rel * b.abs().max(a.abs())
}
