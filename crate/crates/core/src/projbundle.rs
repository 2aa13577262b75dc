//! Chow-ring calculus on a projective bundle `ℙ(ℰ)` over a curve, and the
//! numerical data of fibre-preserving endomorphisms.
//!
//! The ring is `ℤ[D, F] / (F², Dⁿ + c₁Dⁿ⁻¹F)` where `D` is the tautological
//! class, `F` a fibre and `n` the rank of `ℰ`. Elements are stored as
//! `p(D) + q(D)·F` with `deg p, deg q < n`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactreal::{rational_kth_root, IntPolynomial, RatPolynomial, RationalInterval, RealAlgebraicNumber};
use crate::scalar::Scalar;
use crate::serde_util::{BigIntRepr, RationalRepr};

#[derive(Clone, Debug, PartialEq)]
pub struct ChowElement<S> {
    p: Vec<S>,
    q: Vec<S>,
    n: usize,
    c1: BigInt,
}

impl<S: Scalar> ChowElement<S> {
    pub fn zero(n: usize, c1: BigInt) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("bundle rank must be positive"));
        }
        Ok(ChowElement {
            p: vec![S::zero(); n],
            q: vec![S::zero(); n],
            n,
            c1,
        })
    }

    /// Build from unreduced coefficient lists of `p` and `q`.
    pub fn from_parts(n: usize, c1: BigInt, p: Vec<S>, q: Vec<S>) -> Result<Self> {
        let mut out = Self::zero(n, c1)?;
        for (i, c) in p.into_iter().enumerate() {
            out.add_d_term(i, c);
        }
        for (i, c) in q.into_iter().enumerate() {
            out.add_df_term(i, c);
        }
        Ok(out)
    }

    pub fn d_power(n: usize, c1: BigInt, k: usize) -> Result<Self> {
        let mut out = Self::zero(n, c1)?;
        out.add_d_term(k, S::one());
        Ok(out)
    }

    pub fn d_class(n: usize, c1: BigInt) -> Result<Self> {
        Self::d_power(n, c1, 1)
    }

    pub fn f_class(n: usize, c1: BigInt) -> Result<Self> {
        let mut out = Self::zero(n, c1)?;
        out.add_df_term(0, S::one());
        Ok(out)
    }

    pub fn constant(n: usize, c1: BigInt, c: S) -> Result<Self> {
        let mut out = Self::zero(n, c1)?;
        out.add_d_term(0, c);
        Ok(out)
    }

    /// `a·F + b·D`.
    pub fn divisor(n: usize, c1: BigInt, a: S, b: S) -> Result<Self> {
        let mut out = Self::zero(n, c1)?;
        out.add_df_term(0, a);
        out.add_d_term(1, b);
        Ok(out)
    }

    pub fn p(&self) -> &[S] {
        &self.p
    }

    pub fn q(&self) -> &[S] {
        &self.q
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn c1(&self) -> &BigInt {
        &self.c1
    }

    pub fn is_zero(&self) -> bool {
        self.p.iter().chain(&self.q).all(Zero::is_zero)
    }

    // Dⁿ = −c₁Dⁿ⁻¹F, hence Dᵐ = 0 for m > n.
    fn add_d_term(&mut self, k: usize, c: S) {
        if k < self.n {
            self.p[k] = self.p[k].clone() + c;
        } else if k == self.n {
            let t = self.n - 1;
            self.q[t] = self.q[t].clone() - S::from_bigint(&self.c1) * c;
        }
    }

    fn add_df_term(&mut self, k: usize, c: S) {
        if k < self.n {
            self.q[k] = self.q[k].clone() + c;
        }
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.c1 != other.c1 {
            return Err(Error::invalid(format!(
                "ring mismatch: (n={}, c1={}) vs (n={}, c1={})",
                self.n, self.c1, other.n, other.c1
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for i in 0..self.n {
            out.p[i] = out.p[i].clone() + other.p[i].clone();
            out.q[i] = out.q[i].clone() + other.q[i].clone();
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = self.clone();
        for x in out.p.iter_mut().chain(out.q.iter_mut()) {
            *x = c.clone() * x.clone();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let mut out = Self::zero(self.n, self.c1.clone())?;
        for (i, a) in self.p.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.p.iter().enumerate() {
                if !b.is_zero() {
                    out.add_d_term(i + j, a.clone() * b.clone());
                }
            }
            for (j, b) in other.q.iter().enumerate() {
                if !b.is_zero() {
                    out.add_df_term(i + j, a.clone() * b.clone());
                }
            }
        }
        for (i, a) in self.q.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.p.iter().enumerate() {
                if !b.is_zero() {
                    out.add_df_term(i + j, a.clone() * b.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::constant(self.n, self.c1.clone(), S::one())?;
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Components by codimension: `D^i` has codimension `i`, `D^i F` has `i + 1`.
    pub fn codimensions(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.n)
            .filter(|&i| !self.p[i].is_zero())
            .chain((0..self.n).filter(|&i| !self.q[i].is_zero()).map(|i| i + 1))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Degree of a top-codimension class, i.e. the coefficient of `Dⁿ⁻¹F`.
    pub fn intersection_number(&self) -> Result<S> {
        if self.codimensions().iter().any(|&c| c != self.n) {
            return Err(Error::invalid(format!(
                "class {self:?} is not of top codimension {}",
                self.n
            )));
        }
        Ok(self.q[self.n - 1].clone())
    }

    /// Image under the ring map `F ↦ a·F`, `D ↦ c·F + d·D`.
    pub fn pullback(&self, action: &ChowAction<S>) -> Result<Self> {
        let f = Self::f_class(self.n, self.c1.clone())?.scale(&action.fiber);
        let d = Self::divisor(self.n, self.c1.clone(), action.c.clone(), action.d.clone())?;
        let mut out = Self::zero(self.n, self.c1.clone())?;
        let mut dk = Self::constant(self.n, self.c1.clone(), S::one())?;
        for k in 0..self.n {
            let term = dk.scale(&self.p[k]).add(&dk.mul(&f)?.scale(&self.q[k]))?;
            out = out.add(&term)?;
            dk = dk.mul(&d)?;
        }
        Ok(out)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ChowElement<T> {
        ChowElement {
            p: self.p.iter().map(&f).collect(),
            q: self.q.iter().map(&f).collect(),
            n: self.n,
            c1: self.c1.clone(),
        }
    }

    /// Render with a caller-supplied coefficient formatter.
    pub fn render(&self, coeff: impl Fn(&S) -> String) -> String {
        let mut terms = Vec::new();
        let mut push = |c: &S, mono: String| {
            if c.is_zero() {
                return;
            }
            let s = coeff(c);
            let body = match (s.as_str(), mono.is_empty()) {
                (_, true) => s.clone(),
                ("1", false) => mono,
                ("-1", false) => format!("-{mono}"),
                _ if s.contains([' ', '+']) || s[1..].contains('-') => format!("({s}){mono}"),
                _ => format!("{s}{mono}"),
            };
            terms.push(body);
        };
        for i in (0..self.n).rev() {
            push(&self.p[i], d_mono(i));
            push(&self.q[i], match i {
                0 => "F".to_string(),
                _ => format!("{}F", d_mono(i)),
            });
        }
        if terms.is_empty() {
            return "0".into();
        }
        let mut s = terms[0].clone();
        for t in &terms[1..] {
            match t.strip_prefix('-') {
                Some(rest) => s += &format!(" - {rest}"),
                None => s += &format!(" + {t}"),
            }
        }
        s
    }
}

fn d_mono(i: usize) -> String {
    match i {
        0 => String::new(),
        1 => "D".into(),
        _ => format!("D^{i}"),
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for ChowElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|c| c.to_string()))
    }
}

pub fn chow_mul<S: Scalar>(a: &ChowElement<S>, b: &ChowElement<S>) -> Result<ChowElement<S>> {
    a.mul(b)
}

pub fn intersection_number<S: Scalar>(a: &ChowElement<S>) -> Result<S> {
    a.intersection_number()
}

/// `F ↦ fiber·F`, `D ↦ c·F + d·D`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChowAction<S> {
    pub fiber: S,
    pub c: S,
    pub d: S,
}

/// Numerical Harder–Narasimhan type: graded pieces `(rank, degree)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u32, BigIntRepr)>", into = "Vec<(u32, BigIntRepr)>")]
pub struct HNType {
    pieces: Vec<(u32, BigInt)>,
}

impl HNType {
    pub fn new(pieces: Vec<(u32, BigInt)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("HN type needs at least one piece"));
        }
        if pieces.iter().any(|(r, _)| *r == 0) {
            return Err(Error::invalid("HN pieces must have positive rank"));
        }
        let slopes: Vec<BigRational> = pieces
            .iter()
            .map(|(r, d)| BigRational::new(d.clone(), BigInt::from(*r)))
            .collect();
        if slopes.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::invalid("HN slopes must be strictly decreasing"));
        }
        Ok(HNType { pieces })
    }

    pub fn from_i64(pieces: &[(u32, i64)]) -> Result<Self> {
        Self::new(pieces.iter().map(|&(r, d)| (r, BigInt::from(d))).collect())
    }

    /// `ℰ = O(a₁) ⊕ … ⊕ O(aₙ)` on ℙ¹; equal summands are grouped.
    pub fn split(degrees: &[i64]) -> Result<Self> {
        let mut ds = degrees.to_vec();
        ds.sort_unstable_by(|a, b| b.cmp(a));
        let mut runs: Vec<(u32, i64)> = Vec::new();
        for d in ds {
            match runs.last_mut() {
                Some((r, e)) if *e == d => *r += 1,
                _ => runs.push((1, d)),
            }
        }
        let pieces: Vec<(u32, i64)> = runs.into_iter().map(|(r, d)| (r, d * r as i64)).collect();
        Self::from_i64(&pieces)
    }

    pub fn pieces(&self) -> &[(u32, BigInt)] {
        &self.pieces
    }

    pub fn rank(&self) -> usize {
        self.pieces.iter().map(|(r, _)| *r as usize).sum()
    }

    pub fn degree(&self) -> BigInt {
        self.pieces.iter().map(|(_, d)| d.clone()).sum()
    }

    pub fn slopes(&self) -> Vec<BigRational> {
        self.pieces
            .iter()
            .map(|(r, d)| BigRational::new(d.clone(), BigInt::from(*r)))
            .collect()
    }

    pub fn mu_min(&self) -> BigRational {
        self.slopes().pop().expect("nonempty")
    }
}

impl TryFrom<Vec<(u32, BigIntRepr)>> for HNType {
    type Error = Error;

    fn try_from(v: Vec<(u32, BigIntRepr)>) -> Result<Self> {
        Self::new(v.into_iter().map(|(r, d)| (r, d.0)).collect())
    }
}

impl From<HNType> for Vec<(u32, BigIntRepr)> {
    fn from(h: HNType) -> Self {
        h.pieces.into_iter().map(|(r, d)| (r, BigIntRepr(d))).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeStats {
    pub mu_min: BigRational,
    pub mu_max: BigRational,
    pub mu: BigRational,
    pub semistable: bool,
}

pub fn slope_stats(hn: &HNType) -> Result<SlopeStats> {
    let slopes = hn.slopes();
    let mu = BigRational::new(hn.degree(), BigInt::from(hn.rank()));
    let stats = SlopeStats {
        mu_min: slopes.last().expect("nonempty").clone(),
        mu_max: slopes[0].clone(),
        mu,
        semistable: slopes.len() == 1,
    };
    let ordered = if stats.semistable {
        stats.mu_min == stats.mu && stats.mu == stats.mu_max
    } else {
        stats.mu_max > stats.mu && stats.mu > stats.mu_min
    };
    if !ordered {
        return Err(Error::InvariantViolation(format!("slope inequalities fail for {hn:?}")));
    }
    Ok(stats)
}

/// Generators `F` and `D − μ_min·F` of the nef cone of `ℙ(ℰ)`.
pub fn nef_generators(hn: &HNType) -> Result<(ChowElement<BigRational>, ChowElement<BigRational>)> {
    let n = hn.rank();
    let c1 = hn.degree();
    let f = ChowElement::f_class(n, c1.clone())?;
    let d = ChowElement::divisor(n, c1, -hn.mu_min(), BigRational::one())?;
    Ok((f, d))
}

/// The number field element ring `ℚ[t]/(tᵏ − δ)` with `t` read as the real
/// root `d = δ^{1/k}`. Elements are `RatPolynomial`s in `t`.
#[derive(Clone, Debug)]
pub struct RootField {
    k: u32,
    delta: BigRational,
    d: RealAlgebraicNumber,
}

impl RootField {
    pub fn new(delta: BigRational, k: u32) -> Result<Self> {
        if !delta.is_positive() {
            return Err(Error::invalid("delta must be positive"));
        }
        if k == 0 {
            return Err(Error::invalid("root index must be positive"));
        }
        let d = rational_kth_root(&delta, k);
        Ok(RootField { k, delta, d })
    }

    pub fn d(&self) -> &RealAlgebraicNumber {
        &self.d
    }

    pub fn generator(&self) -> RatPolynomial {
        RatPolynomial::t()
    }

    pub fn from_rational(&self, r: &BigRational) -> RatPolynomial {
        RatPolynomial::constant(r.clone())
    }

    fn modulus(&self) -> RatPolynomial {
        RatPolynomial::monomial(BigRational::one(), self.k as usize) - RatPolynomial::constant(self.delta.clone())
    }

    /// Normal form of degree `< k`.
    pub fn reduce(&self, x: &RatPolynomial) -> RatPolynomial {
        x.rem(&self.modulus())
    }

    /// Exact sign of `x(d)`.
    pub fn sign(&self, x: &RatPolynomial) -> Ordering {
        let r = self.reduce(x);
        if r.is_zero() {
            return Ordering::Equal;
        }
        self.d.sign_of(&IntPolynomial::from_rational(&r))
    }

    pub fn is_zero(&self, x: &RatPolynomial) -> bool {
        self.sign(x) == Ordering::Equal
    }

    pub fn eq(&self, a: &RatPolynomial, b: &RatPolynomial) -> bool {
        self.is_zero(&(a.clone() - b.clone()))
    }

    /// The value as an exact rational when `d` is rational or `x` reduces to a constant.
    pub fn as_rational(&self, x: &RatPolynomial) -> Option<BigRational> {
        let r = self.reduce(x);
        if r.degree().unwrap_or(0) == 0 {
            return Some(r.coeff(0));
        }
        self.d.as_rational().map(|d| r.eval(d))
    }

    pub fn enclosure(&self, x: &RatPolynomial, bits: u32) -> RationalInterval {
        let r = self.reduce(x);
        if let Some(v) = self.as_rational(&r) {
            return RationalInterval::point(v);
        }
        let dv = self.d.enclosure_bits(bits);
        let mut acc = RationalInterval::zero();
        for c in r.coeffs().iter().rev() {
            acc = acc * dv.clone() + RationalInterval::point(c.clone());
        }
        acc
    }

    /// `a + b·d + …` with `d` printed symbolically.
    pub fn render(&self, x: &RatPolynomial) -> String {
        if let Some(v) = self.as_rational(x) {
            return v.to_string();
        }
        let r = self.reduce(x);
        let mut terms = Vec::new();
        for (i, c) in r.coeffs().iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "d".to_string(),
                _ => format!("d^{i}"),
            };
            let mag = c.abs();
            let body = match (mono.is_empty(), mag.is_one()) {
                (true, _) => mag.to_string(),
                (false, true) => mono,
                (false, false) => format!("{mag}{mono}"),
            };
            terms.push((c.is_negative(), body));
        }
        let mut s = String::new();
        for (j, (neg, body)) in terms.into_iter().enumerate() {
            match (j, neg) {
                (0, true) => s += &format!("-{body}"),
                (0, false) => s += &body,
                (_, true) => s += &format!(" - {body}"),
                (_, false) => s += &format!(" + {body}"),
            }
        }
        s
    }
}

/// Numerical data of `f: ℙ(ℰ) → ℙ(ℰ)` over `g: C → C`.
#[derive(Clone, Debug)]
pub struct BundleEndoData {
    pub n: usize,
    pub deg_g: BigInt,
    /// `deg f / deg g`
    pub delta: BigRational,
    pub mu_min: BigRational,
    pub c1: BigInt,
    field: RootField,
}

impl BundleEndoData {
    pub fn new(n: usize, deg_g: BigInt, delta: BigRational, mu_min: BigRational, c1: BigInt) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("bundle rank must be at least 2"));
        }
        if !deg_g.is_positive() {
            return Err(Error::invalid("deg g must be positive"));
        }
        let field = RootField::new(delta.clone(), (n - 1) as u32)?;
        Ok(BundleEndoData {
            n,
            deg_g,
            delta,
            mu_min,
            c1,
            field,
        })
    }

    pub fn from_hn(hn: &HNType, deg_g: BigInt, delta: BigRational) -> Result<Self> {
        Self::new(hn.rank(), deg_g, delta, hn.mu_min(), hn.degree())
    }

    pub fn field(&self) -> &RootField {
        &self.field
    }

    /// `d = δ^{1/(n−1)}`.
    pub fn d(&self) -> &RealAlgebraicNumber {
        self.field.d()
    }

    /// `c₁ + n·μ_min`.
    pub fn key(&self) -> BigRational {
        BigRational::from_integer(self.c1.clone()) + BigRational::from_integer(self.n.into()) * self.mu_min.clone()
    }

    pub fn d_equals_deg_g(&self) -> bool {
        self.d().cmp_rational(&BigRational::from_integer(self.deg_g.clone())) == Ordering::Equal
    }

    /// Whether `F ↦ deg_g·F`, `D ↦ c·F + d·D` respects `Dⁿ = −c₁Dⁿ⁻¹F`,
    /// i.e. `dⁿ⁻¹(deg_g − d)(c₁ + n·μ_min) = 0`.
    pub fn is_consistent(&self) -> bool {
        self.key().is_zero() || self.d_equals_deg_g()
    }

    pub fn deg_f(&self) -> BigRational {
        self.delta.clone() * BigRational::from_integer(self.deg_g.clone())
    }
}

#[derive(Clone, Debug)]
pub struct PullbackAction {
    /// Rows indexed by (F, D) coordinates, columns by the images of (F, D).
    pub matrix: [[RatPolynomial; 2]; 2],
    pub eigenvalues: [RatPolynomial; 2],
    pub lambda1: RealAlgebraicNumber,
    pub chow: ChowAction<RatPolynomial>,
}

pub fn pullback_action(data: &BundleEndoData) -> PullbackAction {
    let fld = data.field();
    let g = fld.from_rational(&BigRational::from_integer(data.deg_g.clone()));
    let d = fld.generator();
    let c = fld.reduce(&((g.clone() - d.clone()) * fld.from_rational(&data.mu_min)));
    let zero = RatPolynomial::zero();
    let gr = RealAlgebraicNumber::from_rational(&BigRational::from_integer(data.deg_g.clone()));
    let lambda1 = if data.d().cmp_value(&gr) == Ordering::Greater {
        data.d().clone()
    } else {
        gr
    };
    PullbackAction {
        matrix: [[g.clone(), c.clone()], [zero, d.clone()]],
        eigenvalues: [g.clone(), d.clone()],
        lambda1,
        chow: ChowAction { fiber: g, c, d },
    }
}

impl PullbackAction {
    /// Apply to `a·F + b·D`, returning the new `(a, b)`.
    pub fn apply(&self, fld: &RootField, a: &RatPolynomial, b: &RatPolynomial) -> (RatPolynomial, RatPolynomial) {
        let m = &self.matrix;
        (
            fld.reduce(&(m[0][0].clone() * a.clone() + m[0][1].clone() * b.clone())),
            fld.reduce(&(m[1][0].clone() * a.clone() + m[1][1].clone() * b.clone())),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenvectorCheck {
    /// `f*F = deg_g·F`
    pub fiber: bool,
    /// `f*(D − μ_min·F) = d·(D − μ_min·F)`
    pub nef_boundary: bool,
}

pub fn eigenvector_check(data: &BundleEndoData) -> EigenvectorCheck {
    let fld = data.field();
    let act = pullback_action(data);
    let one = RatPolynomial::one();
    let zero = RatPolynomial::zero();
    let (a, b) = act.apply(fld, &one, &zero);
    let fiber = fld.eq(&a, &act.eigenvalues[0]) && fld.is_zero(&b);
    let mu = fld.from_rational(&-data.mu_min.clone());
    let (a, b) = act.apply(fld, &mu, &one);
    let d = &act.eigenvalues[1];
    let nef_boundary = fld.eq(&a, &(d.clone() * mu.clone())) && fld.eq(&b, d);
    EigenvectorCheck { fiber, nef_boundary }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCheck {
    /// `δ·deg g`
    pub direct: String,
    /// `f*F · (f*D)ⁿ⁻¹` computed in the Chow ring
    pub chow: String,
    pub equal: bool,
}

/// Compare `deg f = δ·deg g` against the top intersection `f*F·(f*D)ⁿ⁻¹`.
pub fn degree_identity_check(data: &BundleEndoData) -> Result<DegreeCheck> {
    let fld = data.field();
    let act = pullback_action(data);
    let n = data.n;
    let c1 = data.c1.clone();
    let f = ChowElement::<RatPolynomial>::f_class(n, c1.clone())?;
    let d = ChowElement::<RatPolynomial>::d_class(n, c1)?;
    let top = f.pullback(&act.chow)?.mul(&d.pullback(&act.chow)?.pow((n - 1) as u32)?)?;
    let chow = fld.reduce(&top.intersection_number()?);
    let direct = fld.from_rational(&data.deg_f());
    Ok(DegreeCheck {
        direct: fld.render(&direct),
        chow: fld.render(&chow),
        equal: fld.eq(&direct, &chow),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dichotomy {
    /// `c₁ + n·μ_min ≠ 0`, so `d = deg g` and `λ₁(f) = λ₁(g)`.
    ForcedBaseEquality,
    /// `μ_min = −μ` while `λ₁(f) > λ₁(g)`.
    SlopeBalanced,
    /// `μ_min = −μ` and `λ₁(f) = λ₁(g)`.
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub class: Dichotomy,
    pub key: RationalRepr,
    /// `false` when `c₁ + n·μ_min ≠ 0` but `d ≠ deg g`: no endomorphism has this data.
    pub consistent: bool,
}

pub fn dichotomy_classify(data: &BundleEndoData) -> DichotomyReport {
    let key = data.key();
    let lambda_equal = data
        .d()
        .cmp_rational(&BigRational::from_integer(data.deg_g.clone()))
        != Ordering::Greater;
    let class = match (key.is_zero(), lambda_equal) {
        (false, _) => Dichotomy::ForcedBaseEquality,
        (true, true) => Dichotomy::Both,
        (true, false) => Dichotomy::SlopeBalanced,
    };
    DichotomyReport {
        class,
        key: RationalRepr(key),
        consistent: data.is_consistent(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueRepr {
    pub exact: String,
    pub interval: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleReport {
    pub n: usize,
    pub c1: BigIntRepr,
    pub mu_min: RationalRepr,
    pub mu: RationalRepr,
    pub semistable: bool,
    pub action_matrix: [[String; 2]; 2],
    pub eigenvalues: [ValueRepr; 2],
    pub lambda1: ValueRepr,
    pub nef_generators: [String; 2],
    pub eigenvectors: EigenvectorCheck,
    pub dichotomy: DichotomyReport,
    pub degree_check: DegreeCheck,
    pub notes: Vec<String>,
}

pub fn bundle_report(hn: &HNType, deg_g: BigInt, delta: BigRational, bits: u32) -> Result<BundleReport> {
    let data = BundleEndoData::from_hn(hn, deg_g, delta)?;
    let stats = slope_stats(hn)?;
    let fld = data.field();
    let act = pullback_action(&data);
    let value = |x: &RatPolynomial| {
        let iv = fld.enclosure(x, bits);
        ValueRepr {
            exact: fld.render(x),
            interval: [iv.lo().to_string(), iv.hi().to_string()],
        }
    };
    let lam = match act.lambda1.as_rational() {
        Some(r) => fld.from_rational(r),
        None => fld.generator(),
    };
    let (f, dgen) = nef_generators(hn)?;
    let dichotomy = dichotomy_classify(&data);
    let mut notes = Vec::new();
    if !dichotomy.consistent {
        notes.push("c1 + n*mu_min != 0 forces d = deg g; this data admits no endomorphism".into());
    }
    if dichotomy.class != Dichotomy::ForcedBaseEquality && stats.semistable && stats.mu.is_zero() {
        notes.push("semistable of degree 0; over the projective line this is the trivial bundle".into());
    }
    Ok(BundleReport {
        n: data.n,
        c1: BigIntRepr(data.c1.clone()),
        mu_min: RationalRepr(stats.mu_min.clone()),
        mu: RationalRepr(stats.mu.clone()),
        semistable: stats.semistable,
        action_matrix: act.matrix.clone().map(|row| row.map(|x| fld.render(&x))),
        eigenvalues: [value(&act.eigenvalues[0]), value(&act.eigenvalues[1])],
        lambda1: value(&lam),
        nef_generators: [f.to_string(), dgen.to_string()],
        eigenvectors: eigenvector_check(&data),
        dichotomy,
        degree_check: degree_identity_check(&data)?,
        notes,
    })
}

/// Config document: `{hn, deg_g, delta}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDoc {
    pub hn: HNType,
    pub deg_g: BigIntRepr,
    pub delta: RationalRepr,
}

impl BundleDoc {
    pub fn build(&self) -> Result<BundleEndoData> {
        BundleEndoData::from_hn(&self.hn, self.deg_g.0.clone(), self.delta.0.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rint};

    fn ce(n: usize, c1: i64, p: &[i64], q: &[i64]) -> ChowElement<BigInt> {
        ChowElement::from_parts(
            n,
            c1.into(),
            p.iter().map(|&x| x.into()).collect(),
            q.iter().map(|&x| x.into()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn products_reduce() {
        let d = ce(2, 3, &[0, 1], &[]);
        let f = ce(2, 3, &[], &[1]);
        assert_eq!(d.mul(&f).unwrap(), ce(2, 3, &[], &[0, 1]));
        assert_eq!(d.mul(&d).unwrap(), ce(2, 3, &[], &[0, -3]));
        let a = ce(2, 0, &[0, 1], &[1]);
        let b = ce(2, 0, &[0, 1], &[-1]);
        assert!(a.mul(&b).unwrap().is_zero());
        assert!(d.mul(&ce(3, 3, &[0, 1], &[])).is_err());
    }

    #[test]
    fn intersection_numbers() {
        for n in 2..6 {
            let top = ChowElement::<BigInt>::d_power(n, 5.into(), n - 1)
                .unwrap()
                .mul(&ChowElement::f_class(n, 5.into()).unwrap())
                .unwrap();
            assert_eq!(top.intersection_number().unwrap(), BigInt::one());
        }
        let d3 = ChowElement::<BigInt>::d_power(3, 2.into(), 3).unwrap();
        assert_eq!(d3.intersection_number().unwrap(), BigInt::from(-2));
        let f = ChowElement::<BigInt>::f_class(3, 2.into()).unwrap();
        assert!(f.mul(&f).unwrap().is_zero());
        assert!(ChowElement::<BigInt>::d_power(3, 2.into(), 2).unwrap().intersection_number().is_err());
    }

    #[test]
    fn nef_examples() {
        let show = |hn: HNType| {
            let (f, d) = nef_generators(&hn).unwrap();
            (f.to_string(), d.to_string())
        };
        assert_eq!(show(HNType::from_i64(&[(2, 2)]).unwrap()), ("F".into(), "D - F".into()));
        assert_eq!(show(HNType::split(&[2, 0]).unwrap()), ("F".into(), "D".into()));
        assert_eq!(show(HNType::split(&[0, -2]).unwrap()), ("F".into(), "D + 2F".into()));
    }

    #[test]
    fn split_groups_equal_summands() {
        assert_eq!(HNType::split(&[1, 1]).unwrap(), HNType::from_i64(&[(2, 2)]).unwrap());
        assert_eq!(HNType::split(&[-1, 3, -1]).unwrap(), HNType::from_i64(&[(1, 3), (2, -2)]).unwrap());
        assert!(HNType::from_i64(&[(1, 0), (1, 2)]).is_err());
    }

    #[test]
    fn slope_examples() {
        let s = slope_stats(&HNType::from_i64(&[(2, 2)]).unwrap()).unwrap();
        assert!(s.semistable && s.mu_min == rint(1) && s.mu_max == rint(1) && s.mu == rint(1));
        let s = slope_stats(&HNType::from_i64(&[(1, 2), (1, 0)]).unwrap()).unwrap();
        assert_eq!((s.mu_max, s.mu, s.mu_min), (rint(2), rint(1), rint(0)));
        let s = slope_stats(&HNType::from_i64(&[(1, 3), (2, 2), (1, -1)]).unwrap()).unwrap();
        assert_eq!((s.mu_max, s.mu, s.mu_min), (rint(3), rint(1), rint(-1)));
    }

    fn data(n: usize, deg_g: i64, delta: BigRational, mu_min: BigRational, c1: i64) -> BundleEndoData {
        BundleEndoData::new(n, deg_g.into(), delta, mu_min, c1.into()).unwrap()
    }

    #[test]
    fn pullback_examples() {
        let dt = data(3, 4, rint(4), rint(-1), -3);
        let act = pullback_action(&dt);
        let fld = dt.field();
        assert_eq!(fld.render(&act.matrix[0][1]), "-2");
        assert_eq!(fld.render(&act.matrix[1][1]), "2");
        assert_eq!(act.lambda1, RealAlgebraicNumber::from_int(4));
        let e = eigenvector_check(&dt);
        assert!(e.fiber && e.nef_boundary);

        let dt = data(2, 1, rint(1), rint(0), 0);
        let act = pullback_action(&dt);
        assert_eq!(act.lambda1, RealAlgebraicNumber::from_int(1));
        assert!(dt.field().is_zero(&act.matrix[0][1]));

        let dt = data(2, 2, rint(8), rint(0), 0);
        let act = pullback_action(&dt);
        assert!(dt.field().is_zero(&act.matrix[0][1]));
        assert_eq!(act.lambda1, RealAlgebraicNumber::from_int(8));
    }

    #[test]
    fn irrational_d() {
        // d = √2 on a rank-3 bundle
        let dt = data(3, 1, rint(2), rint(0), 0);
        let act = pullback_action(&dt);
        assert!(act.lambda1.cmp_rational(&rat(141, 100)) == Ordering::Greater);
        assert!(act.lambda1.cmp_rational(&rat(142, 100)) == Ordering::Less);
        assert!(degree_identity_check(&dt).unwrap().equal);
        assert_eq!(dichotomy_classify(&dt).class, Dichotomy::SlopeBalanced);
        // t⁴ − 4 is reducible; d = √2 still compares exactly
        let dt = data(5, 2, rint(4), rint(0), 0);
        assert!(dt.field().is_zero(&(RatPolynomial::t().pow(2) - RatPolynomial::constant(rint(2)))));
        assert!(degree_identity_check(&dt).unwrap().equal);
    }

    #[test]
    fn degree_identity_examples() {
        let dt = data(3, 3, rint(4), rint(0), 0);
        let c = degree_identity_check(&dt).unwrap();
        assert!(c.equal);
        assert_eq!(c.direct, "12");
        let dt = data(4, 5, rint(1), rint(-2), 3);
        let c = degree_identity_check(&dt).unwrap();
        assert!(c.equal && c.chow == "5");
    }

    #[test]
    fn dichotomy_examples() {
        let cls = |hn: HNType, deg_g: i64, delta: i64| {
            dichotomy_classify(&BundleEndoData::from_hn(&hn, deg_g.into(), rint(delta)).unwrap()).class
        };
        assert_eq!(cls(HNType::split(&[2, 0]).unwrap(), 2, 2), Dichotomy::ForcedBaseEquality);
        assert_eq!(cls(HNType::split(&[0, 0]).unwrap(), 1, 3), Dichotomy::SlopeBalanced);
        assert_eq!(cls(HNType::split(&[0, 0]).unwrap(), 3, 3), Dichotomy::Both);
        assert_eq!(cls(HNType::split(&[1, -1]).unwrap(), 1, 1), Dichotomy::ForcedBaseEquality);
        let bad = BundleEndoData::from_hn(&HNType::split(&[2, 0]).unwrap(), 1.into(), rint(3)).unwrap();
        assert!(!dichotomy_classify(&bad).consistent);
    }

    #[test]
    fn report_round_trips() {
        let hn = HNType::split(&[0, -2]).unwrap();
        let r = bundle_report(&hn, 2.into(), rint(2), 64).unwrap();
        assert_eq!(r.nef_generators[1], "D + 2F");
        let s = serde_json::to_string(&r).unwrap();
        let back: BundleReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let doc: BundleDoc = serde_json::from_str(r#"{"hn": [[1, 0], [1, -2]], "deg_g": 2, "delta": 2}"#).unwrap();
        assert_eq!(doc.hn, hn);
    }
}
