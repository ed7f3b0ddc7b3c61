//! Scalar abstraction for pixel values, thresholds, and features.
//!
//! Every numeric pipeline stage is generic over [`Real`] so the same code
//! runs in `f32` or `f64`. The crate root exports `f64` aliases for the
//! common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating-point scalar used throughout the crate.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Lossy numeric cast into the scalar type.
///
/// Panics if the value is not representable at all (never the case for the
/// integer/float sources used in this crate).
pub(crate) fn cast<F: Real, T: num_traits::ToPrimitive>(value: T) -> F {
    F::from(value).expect("numeric cast into scalar type")
}
