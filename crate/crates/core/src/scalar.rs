use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the solvers are generic over.
///
/// `f32` works for quick experiments; everything shipped with the CLI and the
/// test suite runs on `f64`, and the pinned tolerances assume it.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Sum + 'static {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand for pulling an `f64` literal into the working scalar type.
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite literal converts into any Scalar")
}

/// Ratio of two non-negative integers as a scalar, used for exact grid points.
pub(crate) fn ratio<T: Scalar>(num: u64, den: u64) -> T {
    debug_assert!(den > 0);
    T::from_u64(num).expect("grid numerator fits in Scalar")
        / T::from_u64(den).expect("grid denominator fits in Scalar")
}
