//! Dense univariate polynomials, constant term first.
//!
//! `Polynomial<S>` is a ring over any [`Scalar`]; the integer and rational
//! instantiations carry the exact machinery (gcd, square-free part, Sturm
//! sequences) used by root isolation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exactreal::interval::RationalInterval;
use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

pub type IntPolynomial = Polynomial<BigInt>;
pub type RatPolynomial = Polynomial<BigRational>;

impl<S: Scalar> Polynomial<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate `t`.
    pub fn t() -> Self {
        Self::new(vec![S::zero(), S::one()])
    }

    pub fn monomial(c: S, deg: usize) -> Self {
        let mut coeffs = vec![S::zero(); deg + 1];
        coeffs[deg] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Evaluate with coefficients mapped into another ring.
    pub fn eval_in<T: Scalar>(&self, x: &T, embed: impl Fn(&S) -> T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + embed(c))
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * S::from_i64(i as i64))
                .collect(),
        )
    }

    /// `p(t^k)`.
    pub fn compose_power(&self, k: usize) -> Self {
        assert!(k >= 1);
        let mut coeffs = vec![S::zero(); self.coeffs.len().saturating_sub(1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        Self::new(coeffs)
    }

    /// `p(-t)`.
    pub fn negate_variable(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }
}

impl<S: Scalar> Zero for Polynomial<S> {
    fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<S: Scalar> One for Polynomial<S> {
    fn one() -> Self {
        Polynomial {
            coeffs: vec![S::one()],
        }
    }
}

impl<S: Scalar> Add for Polynomial<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<S: Scalar> Sub for Polynomial<S> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<S: Scalar> Neg for Polynomial<S> {
    type Output = Self;

    fn neg(self) -> Self {
        Polynomial {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<S: Scalar> Mul for Polynomial<S> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

impl<S: Scalar> Scalar for Polynomial<S> {
    fn from_bigint(n: &BigInt) -> Self {
        Self::constant(S::from_bigint(n))
    }
}

impl<S: Field> Polynomial<S> {
    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![S::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while rem.len() > dd {
            let top = rem.last().unwrap().clone();
            let shift = rem.len() - 1 - dd;
            if !top.is_zero() {
                let q = top / lead.clone();
                for (i, c) in divisor.coeffs.iter().enumerate() {
                    rem[shift + i] = rem[shift + i].clone() - q.clone() * c.clone();
                }
                quot[shift] = q;
            }
            rem.pop();
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let l = l.clone();
                Self::new(self.coeffs.iter().map(|c| c.clone() / l.clone()).collect())
            }
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl IntPolynomial {
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn to_rational(&self) -> RatPolynomial {
        self.map(|c| BigRational::from_integer(c.clone()))
    }

    /// Clear denominators with a positive factor and return the primitive
    /// integer polynomial. Signs of values are preserved.
    pub fn from_rational(p: &RatPolynomial) -> Self {
        let lcm = p
            .coeffs()
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints = Self::new(
            p.coeffs()
                .iter()
                .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
                .collect(),
        );
        if ints.is_zero() {
            return ints;
        }
        let g = ints.content();
        Self::new(ints.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn gcd_int(&self, other: &Self) -> Self {
        Self::from_rational(&self.to_rational().gcd(&other.to_rational())).primitive()
    }

    /// Exact quotient; `None` if `divisor` does not divide `self` over Q.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.to_rational().div_rem(&divisor.to_rational());
        if !r.is_zero() {
            return None;
        }
        if q.coeffs().iter().all(|c| c.is_integer()) {
            Some(q.map(|c| c.to_integer()))
        } else {
            Some(Self::from_rational(&q))
        }
    }

    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.primitive();
        }
        let g = self.gcd_int(&self.derivative());
        if g.degree() == Some(0) {
            return self.primitive();
        }
        self.exact_div(&g).expect("gcd divides").primitive()
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * x + BigRational::from_integer(c.clone())
        })
    }

    pub fn sign_at(&self, x: &BigRational) -> Ordering {
        self.eval_rational(x).cmp(&BigRational::zero())
    }

    /// Interval Horner evaluation; the exact range is contained in the result.
    pub fn eval_interval(&self, x: &RationalInterval) -> RationalInterval {
        self.coeffs
            .iter()
            .rev()
            .fold(RationalInterval::zero(), |acc, c| {
                acc * x.clone() + RationalInterval::point(BigRational::from_integer(c.clone()))
            })
    }

    /// Strict bound: every complex root satisfies `|z| < bound`.
    pub fn cauchy_bound(&self) -> BigRational {
        let lead = BigRational::from_integer(self.leading().expect("nonzero").abs());
        let max = self
            .coeffs
            .iter()
            .take(self.coeffs.len() - 1)
            .map(|c| BigRational::from_integer(c.abs()) / &lead)
            .max()
            .unwrap_or_else(BigRational::zero);
        max + BigRational::one()
    }

    /// Sturm sequence, each member scaled by a positive constant to be a
    /// primitive integer polynomial.
    pub fn sturm_sequence(&self) -> Vec<IntPolynomial> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            if seq[n - 1].degree() == Some(0) {
                break;
            }
            let r = seq[n - 2].to_rational().rem(&seq[n - 1].to_rational());
            if r.is_zero() {
                break;
            }
            let next = Self::from_rational(&-r);
            seq.push(next);
        }
        seq
    }

    /// `t^n` followed by descending coefficients, e.g. `t^2 - 3t + 1`.
    pub fn pretty(&self) -> String {
        format!("{}", self)
    }

    /// Rational roots by the rational root theorem. Returns `None` when the
    /// constant or leading coefficient is too large to enumerate divisors.
    pub fn rational_roots(&self) -> Option<Vec<BigRational>> {
        let p = self.primitive();
        let deg = p.degree()?;
        if deg == 0 {
            return Some(Vec::new());
        }
        let mut roots = Vec::new();
        let mut shift = 0;
        while p.coeffs[shift].is_zero() {
            shift += 1;
        }
        if shift > 0 {
            roots.push(BigRational::zero());
        }
        if shift == p.coeffs.len() - 1 {
            return Some(roots);
        }
        let limit = BigInt::from(1_000_000_000_000i64);
        let a0 = p.coeffs[shift].abs();
        let an = p.leading().unwrap().abs();
        if a0 > limit || an > limit {
            return None;
        }
        let num_divs = divisors(&a0);
        let den_divs = divisors(&an);
        let mut seen = std::collections::BTreeSet::new();
        for q in &den_divs {
            for n in &num_divs {
                for s in [1i64, -1] {
                    let r = BigRational::new(n * BigInt::from(s), q.clone());
                    if seen.insert(r.clone()) && p.eval_rational(&r).is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        Some(roots)
    }

    /// Split off linear factors `(q t - p)` for rational roots. Returns the
    /// linear factors (with multiplicity) and the cofactor.
    pub fn split_rational_roots(&self) -> (Vec<IntPolynomial>, IntPolynomial) {
        let mut rest = self.clone();
        let mut linear = Vec::new();
        let roots = match self.rational_roots() {
            Some(r) => r,
            None => return (linear, rest),
        };
        for r in roots {
            let lin = IntPolynomial::new(vec![-r.numer().clone(), r.denom().clone()]);
            while let Some(q) = rest.exact_div(&lin) {
                if rest.degree() == Some(0) {
                    break;
                }
                linear.push(lin.clone());
                rest = q;
            }
        }
        (linear, rest)
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs().to_u64().expect("caller bounds the size");
    if n == 0 {
        return vec![BigInt::one()];
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    let mut divs = vec![1u64];
    for (p, e) in factors {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = 1u64;
            for _ in 0..=e {
                next.push(d * pk);
                pk *= p;
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    divs.into_iter().map(BigInt::from).collect()
}

impl<S: Scalar + fmt::Display + Signed> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = abs.is_one();
            match i {
                0 => write!(f, "{}", abs)?,
                1 if unit => write!(f, "t")?,
                1 => write!(f, "{}t", abs)?,
                _ if unit => write!(f, "t^{}", i)?,
                _ => write!(f, "{}t^{}", abs, i)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn arithmetic_and_display() {
        let a = p(&[1, -3, 1]);
        assert_eq!(a.to_string(), "t^2 - 3t + 1");
        assert_eq!((a.clone() * p(&[1, 1])).coeffs(), p(&[1, -2, -2, 1]).coeffs());
        assert_eq!(a.derivative(), p(&[-3, 2]));
        assert_eq!(p(&[1, 2]).compose_power(3), p(&[1, 0, 0, 2]));
        assert_eq!(p(&[1, 2, 3]).negate_variable(), p(&[1, -2, 3]));
        assert!(IntPolynomial::zero().degree().is_none());
    }

    #[test]
    fn gcd_and_squarefree() {
        let f = p(&[1, 1]) * p(&[1, 1]) * p(&[-2, 0, 1]);
        assert_eq!(f.squarefree_part(), p(&[-2, -2, 1, 1]));
        let g = f.gcd_int(&p(&[1, 1]).pow(3));
        assert_eq!(g, p(&[1, 2, 1]));
    }

    #[test]
    fn rational_roots_split() {
        // t^3 - 17t^2 - 17t + 1 = (t + 1)(t^2 - 18t + 1)
        let f = p(&[1, -17, -17, 1]);
        let (lin, rest) = f.split_rational_roots();
        assert_eq!(lin, vec![p(&[1, 1])]);
        assert_eq!(rest, p(&[1, -18, 1]));
        let roots = p(&[-2, 3]).rational_roots().unwrap();
        assert_eq!(roots, vec![BigRational::new(2.into(), 3.into())]);
    }

    #[test]
    fn sturm_sequence_terminates_in_constant_for_squarefree() {
        let s = p(&[-2, 0, 1]).sturm_sequence();
        assert_eq!(s.last().unwrap().degree(), Some(0));
    }
}
