//! Numeric abstraction shared by every solver routine.
//!
//! Loads and coefficients are generic over [`Scalar`], implemented for `f32`,
//! `f64` and the exact rational type [`Exact`]. Routines that need
//! transcendental functions (nonlinear stiffening, measurement noise) compute
//! their factors in `f64` and convert back.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Num, Signed};

/// Exact rational scalar, used to check algebraic results without rounding.
///
/// Denominators grow with every back-substitution step, so it suits
/// small systems (worked examples, a handful of bolts) rather than full rings.
pub type Exact = Ratio<i128>;

/// Field-like scalar used for loads and interaction coefficients.
pub trait Scalar:
    Copy + Num + Signed + PartialOrd + Debug + Display + FromStr + Send + Sync + 'static
{
    fn from_f64(value: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;

    fn from_usize(value: usize) -> Self {
        Self::from_f64(value as f64)
    }

    /// Larger of two values; `self` wins ties.
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn from_f64(value: f64) -> Self {
                value as $f
            }
            fn to_f64(self) -> f64 {
                self as f64
            }
            fn sqrt(self) -> Self {
                <$f>::sqrt(self)
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for Exact {
    fn from_f64(value: f64) -> Self {
        Ratio::approximate_float(value).unwrap_or_else(|| panic!("{value} has no rational form"))
    }

    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn sqrt(self) -> Self {
        Self::from_f64(self.to_f64().sqrt())
    }

    fn from_usize(value: usize) -> Self {
        Ratio::from_integer(value as i128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_round_trips_decimal_coefficients() {
        let x = Exact::from_f64(-0.175);
        assert_eq!(x, Ratio::new(-7, 40));
        assert_eq!(x.to_f64(), -0.175);
    }

    #[test]
    fn exact_from_usize_is_integral() {
        assert_eq!(Exact::from_usize(20), Ratio::from_integer(20));
    }

    #[test]
    fn max_min_helpers() {
        assert_eq!(2.0f64.max_of(3.0), 3.0);
        assert_eq!(2.0f32.min_of(3.0), 2.0);
    }
}
