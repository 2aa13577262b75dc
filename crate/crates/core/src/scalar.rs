//! Scalar abstractions.
//!
//! Most of the linear algebra and polynomial code in this crate only needs a
//! commutative ring. Exact work happens over `BigInt`/`BigRational`, rational
//! intervals, or polynomial rings; `f64`/`f32` are supported for quick
//! numerical cross-checks.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A commutative ring element that integers embed into.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_bigint(n: &BigInt) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }
}

/// A field. `magnitude` is only used to choose pivots.
pub trait Field: Scalar + Div<Output = Self> {
    fn magnitude(&self) -> f64;
}

/// A field with a total order compatible with the ring operations.
pub trait OrderedField: Field + PartialOrd {}

impl Scalar for BigInt {
    fn from_bigint(n: &BigInt) -> Self {
        n.clone()
    }
}

impl Scalar for BigRational {
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
}

impl Field for BigRational {
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl OrderedField for BigRational {}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_bigint(n: &BigInt) -> Self {
                n.to_f64().unwrap_or(f64::NAN) as $t
            }
        }

        impl Field for $t {
            fn magnitude(&self) -> f64 {
                self.abs() as f64
            }
        }

        impl OrderedField for $t {}
    };
}

impl_float_scalar!(f64);
impl_float_scalar!(f32);

/// Convenience: `BigRational` from a pair of machine integers.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Convenience: integral `BigRational`.
pub fn rint(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `10^(-k)` as an exact rational.
pub fn ten_pow_neg(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), k as usize))
}
