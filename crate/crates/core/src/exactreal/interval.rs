//! Closed rational intervals with outward-sound arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Scalar;

/// `[lo, hi]` with `lo <= hi`. Every operation returns an interval that
/// contains all exact results for inputs drawn from the operands.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RationalInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RationalInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::point(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigRational::zero())
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then(|| RationalInterval { lo, hi })
    }

    pub fn hull(&self, other: &Self) -> Self {
        RationalInterval {
            lo: (&self.lo).min(&other.lo).clone(),
            hi: (&self.hi).max(&other.hi).clone(),
        }
    }

    /// Certified strictly positive.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Certified sign, `None` if the interval straddles or touches zero
    /// without being the point zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.is_positive() {
            Some(Ordering::Greater)
        } else if self.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Upper bound for `|x|` over the interval.
    pub fn mag(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }

    /// Lower bound for `|x|` over the interval.
    pub fn mig(&self) -> BigRational {
        if self.contains_zero() {
            BigRational::zero()
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn abs(&self) -> Self {
        RationalInterval {
            lo: self.mig(),
            hi: self.mag(),
        }
    }

    /// Pointwise maximum with a rational.
    pub fn max_with(&self, c: &BigRational) -> Self {
        RationalInterval {
            lo: (&self.lo).max(c).clone(),
            hi: (&self.hi).max(c).clone(),
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        RationalInterval {
            lo: (&self.lo).max(&other.lo).clone(),
            hi: (&self.hi).max(&other.hi).clone(),
        }
    }

    pub fn recip(&self) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        Some(RationalInterval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|r| self.clone() * r)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            RationalInterval { lo: a, hi: b }
        } else {
            RationalInterval { lo: b, hi: a }
        }
    }

    pub fn powi(&self, k: u32) -> Self {
        if k == 0 {
            return Self::one();
        }
        if k % 2 == 1 || self.lo.is_positive() || self.lo.is_zero() {
            let a = num_traits::pow(self.lo.clone(), k as usize);
            let b = num_traits::pow(self.hi.clone(), k as usize);
            if a <= b {
                RationalInterval { lo: a, hi: b }
            } else {
                RationalInterval { lo: b, hi: a }
            }
        } else if self.hi.is_negative() || self.hi.is_zero() {
            let a = num_traits::pow(self.hi.clone(), k as usize);
            let b = num_traits::pow(self.lo.clone(), k as usize);
            RationalInterval { lo: a, hi: b }
        } else {
            RationalInterval {
                lo: BigRational::zero(),
                hi: num_traits::pow(self.mag(), k as usize),
            }
        }
    }

    /// Integer power with negative exponents allowed.
    pub fn powz(&self, k: i64) -> Option<Self> {
        if k >= 0 {
            Some(self.powi(k as u32))
        } else {
            self.recip().map(|r| r.powi((-k) as u32))
        }
    }

    /// Enclosure of the positive real `n`-th root of a nonnegative interval,
    /// each endpoint located to within `tol` by exact bisection.
    pub fn nth_root(&self, n: u32, tol: &BigRational) -> Option<Self> {
        if self.lo.is_negative() || n == 0 {
            return None;
        }
        let lo = root_bracket(&self.lo, n, tol).0;
        let hi = root_bracket(&self.hi, n, tol).1;
        Some(RationalInterval { lo, hi })
    }

    /// Round endpoints outward onto the grid `2^-bits`.
    pub fn round_outward(&self, bits: u32) -> Self {
        let scale = BigRational::from_integer(BigInt::one() << bits as usize);
        let lo = (&self.lo * &scale).floor() / &scale;
        let hi = (&self.hi * &scale).ceil() / &scale;
        RationalInterval { lo, hi }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.lo.to_f64().unwrap_or(f64::NEG_INFINITY),
            self.hi.to_f64().unwrap_or(f64::INFINITY),
        )
    }
}

/// Bracket `[a, b]` with `a^n <= x <= b^n` and `b - a <= tol`.
fn root_bracket(x: &BigRational, n: u32, tol: &BigRational) -> (BigRational, BigRational) {
    if x.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    let one = BigRational::one();
    let mut lo = BigRational::zero();
    let mut hi = if x > &one { x.clone() } else { one };
    // start from a floating estimate when available
    if let Some(xf) = x.to_f64() {
        if xf.is_finite() && xf > 0.0 {
            let est = xf.powf(1.0 / n as f64);
            if let (Some(a), Some(b)) = (
                BigRational::from_float(est * (1.0 - 1e-9)),
                BigRational::from_float(est * (1.0 + 1e-9)),
            ) {
                if num_traits::pow(a.clone(), n as usize) <= *x {
                    lo = a;
                }
                if num_traits::pow(b.clone(), n as usize) >= *x {
                    hi = b;
                }
            }
        }
    }
    let two = BigRational::from_integer(BigInt::from(2));
    while &hi - &lo > *tol {
        let m = (&lo + &hi) / &two;
        if num_traits::pow(m.clone(), n as usize) <= *x {
            lo = m;
        } else {
            hi = m;
        }
    }
    (lo, hi)
}

impl Zero for RationalInterval {
    fn zero() -> Self {
        Self::point(BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

impl One for RationalInterval {
    fn one() -> Self {
        Self::point(BigRational::one())
    }
}

impl Add for RationalInterval {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        RationalInterval {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
    }
}

impl Sub for RationalInterval {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        RationalInterval {
            lo: self.lo - rhs.hi,
            hi: self.hi - rhs.lo,
        }
    }
}

impl Neg for RationalInterval {
    type Output = Self;

    fn neg(self) -> Self {
        RationalInterval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for RationalInterval {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_point() && rhs.is_point() {
            return Self::point(self.lo * rhs.lo);
        }
        let c = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RationalInterval { lo, hi }
    }
}

impl Scalar for RationalInterval {
    fn from_bigint(n: &BigInt) -> Self {
        Self::point(BigRational::from_integer(n.clone()))
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_f64_pair();
        write!(f, "[{:.12e}, {:.12e}]", a, b)
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: String,
    hi: String,
}

impl Serialize for RationalInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntervalRepr {
            lo: self.lo.to_string(),
            hi: self.hi.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = IntervalRepr::deserialize(d)?;
        let lo: BigRational = r.lo.parse().map_err(serde::de::Error::custom)?;
        let hi: BigRational = r.hi.parse().map_err(serde::de::Error::custom)?;
        if lo > hi {
            return Err(serde::de::Error::custom("interval endpoints out of order"));
        }
        Ok(RationalInterval { lo, hi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rint};

    fn iv(a: i64, b: i64) -> RationalInterval {
        RationalInterval::new(rint(a), rint(b))
    }

    #[test]
    fn products_cover_sign_cases() {
        assert_eq!(iv(-2, 3) * iv(-1, 4), iv(-8, 12));
        assert_eq!(iv(-3, -1).powi(2), iv(1, 9));
        assert_eq!(iv(-1, 2).powi(2), iv(0, 4));
        assert_eq!(iv(1, 2) - iv(1, 2), iv(-1, 1));
    }

    #[test]
    fn h_plus_semantics() {
        let x = RationalInterval::new(rat(1, 2), rat(3, 2));
        assert_eq!(x.max_with(&rint(1)), RationalInterval::new(rint(1), rat(3, 2)));
    }

    #[test]
    fn nth_root_brackets() {
        let r = iv(8, 8).nth_root(3, &rat(1, 1_000_000)).unwrap();
        assert!(r.contains(&rint(2)));
        assert!(r.width() <= rat(2, 1_000_000));
    }

    #[test]
    fn serde_uses_rational_strings() {
        let x = RationalInterval::new(rat(1, 3), rat(1, 2));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"lo":"1/3","hi":"1/2"}"#);
        let back: RationalInterval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
