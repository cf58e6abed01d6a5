//! Scalar abstraction shared by every geometric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumCast};

/// Floating-point coordinate type.
///
/// Implemented for `f32` and `f64`. The tolerances are absolute and assume
/// instances have been normalized into the `[-100, 100]` coordinate box.
pub trait Scalar: Float + FloatConst + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Absolute predicate tolerance.
    fn default_eps() -> Self;

    /// Angle (radians) below which two axis directions count as parallel.
    fn parallel_angle() -> Self;

    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which cannot happen for the finite constants used in this crate.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn default_eps() -> Self {
        1e-9
    }

    fn parallel_angle() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn default_eps() -> Self {
        1e-4
    }

    fn parallel_angle() -> Self {
        1e-5
    }
}

/// Tolerance policy threaded through the predicates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance<T> {
    /// Absolute distance tolerance.
    pub eps: T,
    /// Parallelism threshold for axis directions, in radians.
    pub angle: T,
}

impl<T: Scalar> Tolerance<T> {
    pub fn new(eps: T) -> Self {
        Tolerance {
            eps,
            angle: T::parallel_angle(),
        }
    }
}

impl<T: Scalar> Default for Tolerance<T> {
    fn default() -> Self {
        Tolerance {
            eps: T::default_eps(),
            angle: T::parallel_angle(),
        }
    }
}
