//! Numeric traits the library is generic over.
//!
//! Win matrices only need ring arithmetic, so they accept exact types such as
//! rationals. Everything that takes logarithms or evaluates the normal CDF
//! needs a [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Entry type of a win matrix.
pub trait Weight: Num + Copy + PartialOrd + Debug + Send + Sync {}

impl<T> Weight for T where T: Num + Copy + PartialOrd + Debug + Send + Sync {}

/// Floating point scalar used by the solver, sampling and aggregation code.
pub trait Real:
    Weight + Float + FromPrimitive + ToPrimitive + Display + Default + Sum + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion of a count or index.
    #[inline]
    fn count(x: usize) -> Self {
        Self::from_usize(x).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Numerically stable logistic function `1 / (1 + exp(-x))`.
#[inline]
pub(crate) fn logistic<T: Real>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_is_symmetric_and_saturates_without_nan() {
        for &x in &[-800.0f64, -30.0, -1.0, 0.0, 1.0, 30.0, 800.0] {
            let s = logistic(x) + logistic(-x);
            assert!((s - 1.0).abs() < 1e-15, "x={x}");
        }
        assert_eq!(logistic(0.0f32), 0.5);
        assert_eq!(logistic(-1000.0f64), 0.0);
    }
}
