//! Real algebraic numbers as (square-free integer polynomial, isolating interval).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactreal::interval::RationalInterval;
use crate::exactreal::poly::IntPolynomial;
use crate::serde_util::BigIntRepr;

/// A real root of `poly`, pinned down by `interval`.
///
/// Either the interval is a single point (an exact rational root) or `poly`
/// is nonzero with opposite signs at the two endpoints and has exactly one
/// root strictly between them.
#[derive(Clone, Debug)]
pub struct RealAlgebraicNumber {
    poly: IntPolynomial,
    interval: RationalInterval,
}

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

fn sign_variations(seq: &[IntPolynomial], x: &BigRational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let s = match p.sign_at(x) {
            Ordering::Less => -1,
            Ordering::Greater => 1,
            Ordering::Equal => continue,
        };
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Sign variations at `-inf` or `+inf`.
fn sign_variations_at_infinity(seq: &[IntPolynomial], positive: bool) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let Some(d) = p.degree() else { continue };
        let mut s: i8 = if p.leading().unwrap().is_positive() { 1 } else { -1 };
        if !positive && d % 2 == 1 {
            s = -s;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Number of distinct roots of a square-free `p` in the closed interval.
fn count_roots_closed(p: &IntPolynomial, seq: &[IntPolynomial], iv: &RationalInterval) -> usize {
    let base = sign_variations(seq, iv.lo()) - sign_variations(seq, iv.hi());
    if p.sign_at(iv.lo()) == Ordering::Equal {
        base + 1
    } else {
        base
    }
}

/// Number of distinct real roots of `p`, by Sturm's theorem.
pub fn count_real_roots(p: &IntPolynomial) -> usize {
    let sf = p.squarefree_part();
    if sf.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let seq = sf.sturm_sequence();
    sign_variations_at_infinity(&seq, false) - sign_variations_at_infinity(&seq, true)
}

/// All real roots of `p`, ascending. Rational roots come back as exact points
/// with linear defining polynomials.
pub fn isolate_real_roots(p: &IntPolynomial) -> Result<Vec<RealAlgebraicNumber>> {
    if p.is_zero() {
        return Err(Error::invalid("cannot isolate roots of the zero polynomial"));
    }
    let sf = p.squarefree_part();
    let (linear, rest) = sf.split_rational_roots();
    let mut roots: Vec<RealAlgebraicNumber> = linear
        .iter()
        .map(|l| {
            let r = BigRational::new(-l.coeff(0), l.coeff(1));
            RealAlgebraicNumber::from_rational(&r)
        })
        .collect();
    if rest.degree().unwrap_or(0) > 0 {
        let rest = rest.primitive();
        let seq = rest.sturm_sequence();
        let b = BigRational::from_integer(rest.cauchy_bound().ceil().to_integer());
        let mut stack = vec![RationalInterval::new(-b.clone(), b)];
        while let Some(iv) = stack.pop() {
            // roots in (lo, hi]
            let n = sign_variations(&seq, iv.lo()) - sign_variations(&seq, iv.hi());
            if n == 0 {
                continue;
            }
            let lo_zero = rest.sign_at(iv.lo()) == Ordering::Equal;
            let hi_zero = rest.sign_at(iv.hi()) == Ordering::Equal;
            if n == 1 && hi_zero {
                roots.push(RealAlgebraicNumber::from_rational(iv.hi()));
                continue;
            }
            if n == 1 && !lo_zero {
                roots.push(RealAlgebraicNumber::from_parts(rest.clone(), iv));
                continue;
            }
            let m = iv.mid();
            stack.push(RationalInterval::new(iv.lo().clone(), m.clone()));
            stack.push(RationalInterval::new(m, iv.hi().clone()));
        }
    }
    roots.sort_by(|a, b| a.cmp_value(b));
    Ok(roots)
}

/// Largest real root of `p`, found by Sturm-guided bisection without
/// isolating the other roots.
pub fn largest_real_root(p: &IntPolynomial) -> Result<Option<RealAlgebraicNumber>> {
    if p.is_zero() {
        return Err(Error::invalid("cannot isolate roots of the zero polynomial"));
    }
    let (linear, rest) = p.squarefree_part().split_rational_roots();
    let best_rational = linear
        .iter()
        .map(|l| BigRational::new(-l.coeff(0), l.coeff(1)))
        .max()
        .map(|r| RealAlgebraicNumber::from_rational(&r));
    let sf = rest.primitive();
    if sf.degree().unwrap_or(0) == 0 {
        return Ok(best_rational);
    }
    let seq = sf.sturm_sequence();
    let irrational = largest_root_sturm(&sf, &seq)?;
    Ok(match (irrational, best_rational) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    })
}

fn largest_root_sturm(sf: &IntPolynomial, seq: &[IntPolynomial]) -> Result<Option<RealAlgebraicNumber>> {
    if sign_variations_at_infinity(&seq, false) == sign_variations_at_infinity(&seq, true) {
        return Ok(None);
    }
    let b = BigRational::from_integer(sf.cauchy_bound().ceil().to_integer());
    let mut lo = -b.clone();
    let mut hi = b;
    let v_hi = sign_variations(seq, &hi);
    loop {
        // invariant: the largest root lies in (lo, hi]
        let n = sign_variations(seq, &lo) - v_hi;
        if n == 1 {
            if sf.sign_at(&hi) == Ordering::Equal {
                return Ok(Some(RealAlgebraicNumber::from_rational(&hi)));
            }
            if sf.sign_at(&lo) != Ordering::Equal {
                let iv = RationalInterval::new(lo, hi);
                return RealAlgebraicNumber::from_isolating(sf, iv).map(Some);
            }
        }
        let m = (&lo + &hi) / two();
        if sign_variations(seq, &m) > v_hi {
            lo = m;
        } else {
            hi = m;
        }
    }
}

/// Largest absolute value of a real root of `p`.
pub fn largest_abs_real_root(p: &IntPolynomial) -> Result<Option<RealAlgebraicNumber>> {
    let a = largest_real_root(p)?;
    let b = largest_real_root(&p.negate_variable())?;
    Ok(match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    })
}

impl RealAlgebraicNumber {
    fn from_parts(poly: IntPolynomial, interval: RationalInterval) -> Self {
        RealAlgebraicNumber { poly, interval }
    }

    /// Build from a polynomial and an interval claimed to isolate one root.
    /// The claim is checked with a Sturm count.
    pub fn from_isolating(poly: &IntPolynomial, interval: RationalInterval) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::invalid("zero defining polynomial"));
        }
        let sf = poly.squarefree_part();
        let seq = sf.sturm_sequence();
        if sf.degree().unwrap_or(0) == 0 || count_roots_closed(&sf, &seq, &interval) != 1 {
            return Err(Error::invalid("interval does not isolate exactly one root"));
        }
        if interval.is_point() {
            return Ok(Self::from_rational(interval.lo()));
        }
        let lo_zero = sf.sign_at(interval.lo()) == Ordering::Equal;
        let hi_zero = sf.sign_at(interval.hi()) == Ordering::Equal;
        if lo_zero {
            return Ok(Self::from_rational(interval.lo()));
        }
        if hi_zero {
            return Ok(Self::from_rational(interval.hi()));
        }
        Ok(Self::from_parts(sf, interval))
    }

    pub fn from_rational(r: &BigRational) -> Self {
        RealAlgebraicNumber {
            poly: IntPolynomial::new(vec![-r.numer().clone(), r.denom().clone()]),
            interval: RationalInterval::point(r.clone()),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    /// The largest real root of `p`, if any.
    pub fn largest_root(p: &IntPolynomial) -> Result<Option<Self>> {
        Ok(isolate_real_roots(p)?.pop())
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn interval(&self) -> &RationalInterval {
        &self.interval
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.interval.is_point().then(|| self.interval.lo())
    }

    pub fn is_rational(&self) -> bool {
        self.interval.is_point()
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.refined(&BigRational::new(BigInt::one(), BigInt::from(1u64 << 60)));
        r.interval.mid_f64()
    }

    /// Bisect until the interval has width at most `eps`. Each returned
    /// interval lies inside the previous one.
    pub fn refined(&self, eps: &BigRational) -> Self {
        let mut lo = self.interval.lo().clone();
        let mut hi = self.interval.hi().clone();
        if lo == hi {
            return self.clone();
        }
        let lo_sign = self.poly.sign_at(&lo);
        let t = two();
        while &hi - &lo > *eps {
            let m = (&lo + &hi) / &t;
            match self.poly.sign_at(&m) {
                Ordering::Equal => return Self::from_rational(&m),
                s if s == lo_sign => lo = m,
                _ => hi = m,
            }
        }
        Self::from_parts(self.poly.clone(), RationalInterval::new(lo, hi))
    }

    pub fn refine(&self, eps: &BigRational) -> RationalInterval {
        self.refined(eps).interval
    }

    /// Enclosure of width at most `2^-bits`.
    pub fn enclosure_bits(&self, bits: u32) -> RationalInterval {
        self.refine(&BigRational::new(BigInt::one(), BigInt::one() << bits as usize))
    }

    fn halved(&self) -> Self {
        if self.is_rational() {
            return self.clone();
        }
        let w = self.interval.width() / two();
        self.refined(&w)
    }

    /// Whether `self` is a root of `q`. Exact.
    pub fn is_root_of(&self, q: &IntPolynomial) -> bool {
        if q.is_zero() {
            return true;
        }
        if let Some(r) = self.as_rational() {
            return q.eval_rational(r).is_zero();
        }
        let g = self.poly.gcd_int(q);
        if g.degree().unwrap_or(0) == 0 {
            return false;
        }
        let seq = g.sturm_sequence();
        count_roots_closed(&g, &seq, &self.interval) > 0
    }

    /// Exact sign of `q(self)`.
    pub fn sign_of(&self, q: &IntPolynomial) -> Ordering {
        if let Some(r) = self.as_rational() {
            return q.sign_at(r);
        }
        if self.is_root_of(q) {
            return Ordering::Equal;
        }
        let mut x = self.clone();
        loop {
            if let Some(s) = q.eval_interval(&x.interval).sign() {
                if s != Ordering::Equal {
                    return s;
                }
            }
            x = x.halved();
            if let Some(r) = x.as_rational() {
                return q.sign_at(r);
            }
        }
    }

    pub fn signum(&self) -> Ordering {
        self.sign_of(&IntPolynomial::t())
    }

    /// Exact comparison. Equality is decided by a common root of the two
    /// defining polynomials inside both intervals.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        if let (Some(a), Some(b)) = (self.as_rational(), other.as_rational()) {
            return a.cmp(b);
        }
        if self.interval.hi() < other.interval.lo() {
            return Ordering::Less;
        }
        if other.interval.hi() < self.interval.lo() {
            return Ordering::Greater;
        }
        if let Some(common) = self.interval.intersect(&other.interval) {
            let g = self.poly.gcd_int(&other.poly);
            if g.degree().unwrap_or(0) > 0 {
                let seq = g.sturm_sequence();
                if count_roots_closed(&g, &seq, &common) > 0 {
                    return Ordering::Equal;
                }
            }
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        loop {
            a = a.halved();
            b = b.halved();
            if a.interval.hi() < b.interval.lo() {
                return Ordering::Less;
            }
            if b.interval.hi() < a.interval.lo() {
                return Ordering::Greater;
            }
            if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
                return x.cmp(y);
            }
        }
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.cmp_value(&Self::from_rational(r))
    }

    pub fn neg(&self) -> Self {
        RealAlgebraicNumber {
            poly: self.poly.negate_variable().primitive(),
            interval: -self.interval.clone(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self.cmp_value(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    /// Positive real `k`-th root of a positive algebraic number.
    pub fn kth_root(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("root index must be positive"));
        }
        if self.signum() != Ordering::Greater {
            return Err(Error::Domain("k-th root of a non-positive number".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        if let Some(r) = self.as_rational() {
            return Ok(rational_kth_root(r, k));
        }
        // t -> t^k is increasing on t > 0, so a positive bracket [l, h] with
        // [l^k, h^k] inside the isolating interval isolates the k-th root
        let q = self.poly.compose_power(k as usize);
        let outer = self.interval.clone();
        let four = BigRational::from_integer(BigInt::from(4));
        let mut w = outer.width() / &four;
        loop {
            let inner = self.refine(&w);
            if inner.lo().is_positive() {
                let l = rational_kth_root(inner.lo(), k).refine(&w).lo().clone();
                let h = rational_kth_root(inner.hi(), k).refine(&w).hi().clone();
                if l.is_positive()
                    && num_traits::pow(l.clone(), k as usize) > *outer.lo()
                    && num_traits::pow(h.clone(), k as usize) < *outer.hi()
                {
                    return Self::from_isolating(&q, RationalInterval::new(l, h));
                }
            }
            w = w / &four;
        }
    }

    /// `self^k` as an interval at the given refinement width.
    pub fn pow_enclosure(&self, k: u32, eps: &BigRational) -> RationalInterval {
        self.refine(eps).powi(k)
    }
}

/// `r^(1/k)` for positive rational `r`, exact when `r` is a perfect power.
pub fn rational_kth_root(r: &BigRational, k: u32) -> RealAlgebraicNumber {
    let n = r.numer().nth_root(k);
    let d = r.denom().nth_root(k);
    if num_traits::pow(n.clone(), k as usize) == *r.numer()
        && num_traits::pow(d.clone(), k as usize) == *r.denom()
    {
        return RealAlgebraicNumber::from_rational(&BigRational::new(n, d));
    }
    let mut coeffs = vec![BigInt::zero(); k as usize + 1];
    coeffs[0] = -r.numer().clone();
    coeffs[k as usize] = r.denom().clone();
    let p = IntPolynomial::new(coeffs);
    // bracket between consecutive integer-root estimates
    let lo = BigRational::new(n, d.clone() + BigInt::one());
    let hi = BigRational::new(r.numer().nth_root(k) + BigInt::one(), d);
    RealAlgebraicNumber::from_parts(p, RationalInterval::new(lo, hi))
}

impl PartialEq for RealAlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl fmt::Display for RealAlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{}", r);
        }
        write!(f, "root of {} near {:.12}", self.poly, self.to_f64())
    }
}

#[derive(Serialize, Deserialize)]
struct AlgebraicRepr {
    poly: Vec<BigIntRepr>,
    lo: String,
    hi: String,
}

impl Serialize for RealAlgebraicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AlgebraicRepr {
            poly: self.poly.coeffs().iter().cloned().map(BigIntRepr).collect(),
            lo: self.interval.lo().to_string(),
            hi: self.interval.hi().to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealAlgebraicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = AlgebraicRepr::deserialize(d)?;
        let poly = IntPolynomial::new(r.poly.into_iter().map(|c| c.0).collect());
        let lo: BigRational = r.lo.parse().map_err(serde::de::Error::custom)?;
        let hi: BigRational = r.hi.parse().map_err(serde::de::Error::custom)?;
        if lo > hi {
            return Err(serde::de::Error::custom("interval endpoints out of order"));
        }
        RealAlgebraicNumber::from_isolating(&poly, RationalInterval::new(lo, hi))
            .map_err(serde::de::Error::custom)
    }
}

/// Width of an interval as `f64`, for reporting.
pub fn width_f64(iv: &RationalInterval) -> f64 {
    iv.width().to_f64().unwrap_or(f64::INFINITY)
}
