//! Scalar abstraction for the numeric type the geometry and evaluation
//! math runs on.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
///
/// Everything numeric in this crate is generic over `Scalar`; the concrete
/// defaults at the crate root use `f64` for geometry and `f32` for pixels.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Copy + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` constant into `T`.
pub(crate) fn num<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("f64 constant representable in scalar type")
}

/// Converts an integer count into `T`.
pub(crate) fn count<T: Scalar>(v: u64) -> T {
    T::from_u64(v).expect("count representable in scalar type")
}
