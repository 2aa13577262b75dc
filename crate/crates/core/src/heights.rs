//! Weil heights on products of projective spaces over Q.

use std::fmt;

use malachite_base::num::arithmetic::traits::Gcd;
use malachite_nz::natural::Natural;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactreal::log::ln_int;
use crate::exactreal::algebraic::width_f64;
use crate::exactreal::RationalInterval;
use crate::serde_util::BigIntRepr;

/// Bits of absolute precision for a relative log tolerance such as `1e-12`.
pub fn bits_for_tolerance(tol: f64) -> u32 {
    if !(tol > 0.0) || tol >= 1.0 {
        return 8;
    }
    (-tol.log2()).ceil() as u32 + 4
}

pub const DEFAULT_LOG_BITS: u32 = 44;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiProjSpace {
    pub factor_dims: Vec<usize>,
}

impl MultiProjSpace {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() || factor_dims.iter().any(|&n| n == 0) {
            return Err(Error::invalid("need at least one factor of positive dimension"));
        }
        Ok(MultiProjSpace { factor_dims })
    }

    pub fn p1_power(k: usize) -> Self {
        MultiProjSpace {
            factor_dims: vec![1; k],
        }
    }

    pub fn factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn contains(&self, p: &MultiProjPoint) -> bool {
        p.factors.len() == self.factor_dims.len()
            && p.factors.iter().zip(&self.factor_dims).all(|(f, &n)| f.len() == n + 1)
    }
}

/// Above this size num-bigint's quadratic gcd dominates orbit iteration.
const LARGE_GCD_BITS: u64 = 4096;

/// Nonnegative gcd, delegating large operands to malachite's subquadratic
/// algorithm.
pub fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    if a.bits().min(b.bits()) < LARGE_GCD_BITS {
        return a.gcd(b);
    }
    let nat = |x: &BigInt| Natural::from_owned_limbs_asc(x.magnitude().to_u64_digits());
    let g = nat(a).gcd(nat(b));
    BigInt::from_biguint(Sign::Plus, BigUint::new(limbs_to_u32(&g.to_limbs_asc())))
}

fn limbs_to_u32(limbs: &[u64]) -> Vec<u32> {
    limbs.iter().flat_map(|&l| [l as u32, (l >> 32) as u32]).collect()
}

/// Primitive integer representative of a projective tuple: gcd 1, first
/// nonzero entry positive.
pub fn normalize_tuple(v: &[BigInt]) -> Result<Vec<BigInt>> {
    let g = v.iter().fold(BigInt::zero(), |g, x| gcd_big(&g, x));
    if g.is_zero() {
        return Err(Error::invalid("zero coordinate tuple"));
    }
    let neg = v.iter().find(|x| !x.is_zero()).map_or(false, |x| x.is_negative());
    let g = if neg { -g } else { g };
    Ok(v.iter().map(|x| x / &g).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiProjPoint {
    factors: Vec<Vec<BigInt>>,
}

impl MultiProjPoint {
    pub fn new(factors: Vec<Vec<BigInt>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("point needs at least one factor"));
        }
        if factors.iter().any(|f| f.len() < 2) {
            return Err(Error::invalid("each factor needs at least two coordinates"));
        }
        let factors = factors.iter().map(|f| normalize_tuple(f)).collect::<Result<_>>()?;
        Ok(MultiProjPoint { factors })
    }

    pub fn from_i64(factors: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            factors
                .iter()
                .map(|f| f.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// Affine torus point `(x_1, ..., x_n)` as `([x_1 : 1], ..., [x_n : 1])`.
    pub fn from_affine(xs: &[BigRational]) -> Result<Self> {
        Self::new(
            xs.iter()
                .map(|x| vec![x.numer().clone(), x.denom().clone()])
                .collect(),
        )
    }

    pub fn factors(&self) -> &[Vec<BigInt>] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &[BigInt] {
        &self.factors[i]
    }

    pub fn space(&self) -> MultiProjSpace {
        MultiProjSpace {
            factor_dims: self.factors.iter().map(|f| f.len() - 1).collect(),
        }
    }

    /// Affine coordinates `x_0 / x_1` of each ℙ¹ factor; `None` at infinity.
    pub fn affine(&self) -> Vec<Option<BigRational>> {
        self.factors
            .iter()
            .map(|f| {
                if f[1].is_zero() {
                    None
                } else {
                    Some(BigRational::new(f[0].clone(), f[1].clone()))
                }
            })
            .collect()
    }

    pub fn project(&self, keep: &[usize]) -> Result<Self> {
        if keep.iter().any(|&i| i >= self.factors.len()) {
            return Err(Error::invalid("projection index out of range"));
        }
        Ok(MultiProjPoint {
            factors: keep.iter().map(|&i| self.factors[i].clone()).collect(),
        })
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        MultiProjPoint { factors }
    }

    pub fn max_bits(&self) -> u64 {
        self.factors
            .iter()
            .flatten()
            .map(|x| x.bits())
            .max()
            .unwrap_or(0)
    }

    pub fn heights(&self) -> ExactHeight {
        factor_heights(self)
    }

    pub fn to_json(&self) -> Vec<Vec<BigIntRepr>> {
        self.factors
            .iter()
            .map(|f| f.iter().cloned().map(BigIntRepr).collect())
            .collect()
    }
}

impl fmt::Display for MultiProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, fac) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in fac.iter().enumerate() {
                if j > 0 {
                    write!(f, ":")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, ")")
    }
}

impl Serialize for MultiProjPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiProjPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<Vec<BigIntRepr>> = Vec::deserialize(d)?;
        MultiProjPoint::new(raw.into_iter().map(|f| f.into_iter().map(|x| x.0).collect()).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// `Π atoms[k]^exps[k]` over a pairwise coprime base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredInt {
    pub atoms: Vec<BigInt>,
    pub exps: Vec<BigInt>,
}

impl FactoredInt {
    pub fn log(&self, bits: u32) -> RationalInterval {
        let emax = self.exps.iter().map(|e| e.bits()).max().unwrap_or(0) as u32;
        let inner = bits + emax + 4;
        self.atoms
            .iter()
            .zip(&self.exps)
            .filter(|(_, e)| !e.is_zero())
            .fold(RationalInterval::zero(), |acc, (a, e)| {
                acc + ln_int(a, inner)
                    .expect("atoms are > 1")
                    .scale(&BigRational::from_integer(e.clone()))
            })
            .round_outward(bits + 2)
    }

    pub fn bits_estimate(&self) -> u64 {
        self.atoms
            .iter()
            .zip(&self.exps)
            .map(|(a, e)| {
                let b = BigInt::from(a.bits()) * e;
                u64::try_from(b).unwrap_or(u64::MAX)
            })
            .fold(0u64, |s, b| s.saturating_add(b))
    }

    pub fn expand(&self, cap_bits: u64) -> Result<BigInt> {
        if self.bits_estimate() > cap_bits {
            return Err(Error::ResourceLimit(format!(
                "coordinate of about {} bits exceeds cap of {cap_bits}",
                self.bits_estimate()
            )));
        }
        let mut r = BigInt::one();
        for (a, e) in self.atoms.iter().zip(&self.exps) {
            let k = u32::try_from(e).map_err(|_| Error::ResourceLimit("exponent too large".into()))?;
            r *= a.pow(k);
        }
        Ok(r)
    }
}

impl fmt::Display for FactoredInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .atoms
            .iter()
            .zip(&self.exps)
            .filter(|(_, e)| !e.is_zero())
            .map(|(a, e)| if e.is_one() { a.to_string() } else { format!("{a}^{e}") })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Largest coordinate magnitude of one factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum House {
    Int(BigInt),
    /// Maximum over the listed candidates; exact comparison may be
    /// unavailable for factored values.
    Factored(Vec<FactoredInt>),
}

impl House {
    pub fn log(&self, bits: u32) -> RationalInterval {
        match self {
            House::Int(h) => ln_int(h, bits).expect("houses are >= 1"),
            House::Factored(c) => c
                .iter()
                .map(|x| x.log(bits))
                .reduce(|a, b| a.max(&b))
                .unwrap_or_else(RationalInterval::zero),
        }
    }
}

impl fmt::Display for House {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            House::Int(h) => write!(f, "{h}"),
            House::Factored(c) if c.len() == 1 => write!(f, "{}", c[0]),
            House::Factored(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "max({})", parts.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactHeight {
    pub houses: Vec<House>,
}

impl ExactHeight {
    pub fn factor_logs(&self, bits: u32) -> Vec<RationalInterval> {
        self.houses.iter().map(|h| h.log(bits)).collect()
    }

    /// Height for `O(1, ..., 1)`: the sum of the factor heights.
    pub fn total(&self, bits: u32) -> RationalInterval {
        self.factor_logs(bits)
            .into_iter()
            .fold(RationalInterval::zero(), |a, b| a + b)
    }

    pub fn int_houses(&self) -> Option<Vec<BigInt>> {
        self.houses
            .iter()
            .map(|h| match h {
                House::Int(x) => Some(x.clone()),
                House::Factored(_) => None,
            })
            .collect()
    }

    pub fn report(&self, bits: u32) -> HeightReport {
        let total = self.total(bits);
        HeightReport {
            factor_houses: self.houses.iter().map(|h| h.to_string()).collect(),
            log_value: total.mid_f64(),
            error: width_f64(&total),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeightReport {
    pub factor_houses: Vec<String>,
    pub log_value: f64,
    pub error: f64,
}

pub fn factor_heights(p: &MultiProjPoint) -> ExactHeight {
    ExactHeight {
        houses: p
            .factors
            .iter()
            .map(|f| House::Int(f.iter().map(|x| x.abs()).max().expect("nonempty")))
            .collect(),
    }
}

/// `Σ a_i log H_i`.
pub fn divisor_height(h: &ExactHeight, coeffs: &[RationalInterval], bits: u32) -> Result<RationalInterval> {
    if coeffs.len() != h.houses.len() {
        return Err(Error::invalid(format!(
            "{} weights for {} factors",
            coeffs.len(),
            h.houses.len()
        )));
    }
    let logs = h.factor_logs(bits);
    Ok(coeffs
        .iter()
        .zip(logs)
        .fold(RationalInterval::zero(), |acc, (a, l)| acc + a.clone() * l))
}

pub fn h_plus(value: &RationalInterval) -> RationalInterval {
    value.max_with(&BigRational::one())
}

/// All primitive tuples of length `n + 1` with entries in `[-b, b]`.
pub fn bounded_tuples(n: usize, b: u64) -> Vec<Vec<BigInt>> {
    let b = b as i64;
    let width = (2 * b + 1) as usize;
    let total = width.pow((n + 1) as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut k = idx;
        let mut v = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            v.push(BigInt::from((k % width) as i64 - b));
            k /= width;
        }
        v.reverse();
        let first = v.iter().find(|x| !x.is_zero());
        let Some(first) = first else { continue };
        if first.is_negative() {
            continue;
        }
        if v.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one() {
            out.push(v);
        }
    }
    out
}

/// Normalized points with every coordinate bounded by `b` in absolute value.
pub fn enumerate_bounded_points(space: &MultiProjSpace, b: u64) -> impl Iterator<Item = MultiProjPoint> {
    let lists: Vec<Vec<Vec<BigInt>>> = space.factor_dims.iter().map(|&n| bounded_tuples(n, b)).collect();
    let total: usize = lists.iter().map(|l| l.len()).product();
    (0..total).map(move |mut idx| {
        let mut factors = vec![Vec::new(); lists.len()];
        for (i, l) in lists.iter().enumerate().rev() {
            factors[i] = l[idx % l.len()].clone();
            idx /= l.len();
        }
        MultiProjPoint { factors }
    })
}

/// Pairwise coprime integers `> 1` generating the given positive integers
/// multiplicatively.
pub fn coprime_base(ns: &[BigInt]) -> Vec<BigInt> {
    let mut atoms: Vec<BigInt> = ns.iter().map(|n| n.abs()).filter(|n| n > &BigInt::one()).collect();
    atoms.sort();
    atoms.dedup();
    'outer: loop {
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                let g = atoms[i].gcd(&atoms[j]);
                if !g.is_one() {
                    let a = &atoms[i] / &g;
                    let b = &atoms[j] / &g;
                    atoms.remove(j);
                    atoms.remove(i);
                    atoms.extend([g, a, b].into_iter().filter(|x| x > &BigInt::one()));
                    atoms.sort();
                    atoms.dedup();
                    continue 'outer;
                }
            }
        }
        return atoms;
    }
}

/// Exponent vector of `n` over the base; `None` if `n` is not generated.
pub fn factor_over(n: &BigInt, atoms: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut r = n.abs();
    if r.is_zero() {
        return None;
    }
    let mut exps = vec![BigInt::zero(); atoms.len()];
    for (k, a) in atoms.iter().enumerate() {
        loop {
            let (q, rem) = r.div_rem(a);
            if !rem.is_zero() {
                break;
            }
            r = q;
            exps[k] += 1;
        }
    }
    r.is_one().then_some(exps)
}

/// A coordinate `±Π atoms^e` with exponents of either sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactoredCoord {
    Zero,
    Unit { negative: bool, exps: Vec<BigInt> },
}

/// A point on a product of projective spaces whose coordinates are kept as
/// exponent vectors over a shared coprime base. Used for orbits of maps
/// given by monomials, whose coordinates quickly become too large to write
/// out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredPoint {
    pub atoms: Vec<BigInt>,
    pub factors: Vec<Vec<FactoredCoord>>,
}

impl FactoredPoint {
    pub fn from_point(p: &MultiProjPoint) -> Self {
        let all: Vec<BigInt> = p.factors.iter().flatten().cloned().collect();
        let atoms = coprime_base(&all);
        let factors = p
            .factors
            .iter()
            .map(|f| {
                f.iter()
                    .map(|x| {
                        if x.is_zero() {
                            FactoredCoord::Zero
                        } else {
                            FactoredCoord::Unit {
                                negative: x.is_negative(),
                                exps: factor_over(x, &atoms).expect("base generates inputs"),
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        FactoredPoint { atoms, factors }
    }

    /// Clears denominators and common factors; fixes the sign convention.
    pub fn normalize(&mut self) {
        let k = self.atoms.len();
        for f in &mut self.factors {
            let mut mins: Vec<Option<BigInt>> = vec![None; k];
            for c in f.iter() {
                if let FactoredCoord::Unit { exps, .. } = c {
                    for (m, e) in mins.iter_mut().zip(exps) {
                        if m.as_ref().map_or(true, |m| e < m) {
                            *m = Some(e.clone());
                        }
                    }
                }
            }
            let flip = f.iter().find_map(|c| match c {
                FactoredCoord::Unit { negative, .. } => Some(*negative),
                FactoredCoord::Zero => None,
            }) == Some(true);
            for c in f.iter_mut() {
                if let FactoredCoord::Unit { negative, exps } = c {
                    for (e, m) in exps.iter_mut().zip(&mins) {
                        *e -= m.as_ref().expect("set by a unit coordinate");
                    }
                    if flip {
                        *negative = !*negative;
                    }
                }
            }
        }
    }

    fn coord_int(&self, c: &FactoredCoord) -> Option<FactoredInt> {
        match c {
            FactoredCoord::Zero => None,
            FactoredCoord::Unit { exps, .. } => Some(FactoredInt {
                atoms: self.atoms.clone(),
                exps: exps.clone(),
            }),
        }
    }

    /// Houses of a normalized point.
    pub fn heights(&self) -> ExactHeight {
        ExactHeight {
            houses: self
                .factors
                .iter()
                .map(|f| {
                    let mut cands: Vec<FactoredInt> = Vec::new();
                    for c in f.iter().filter_map(|c| self.coord_int(c)) {
                        // drop candidates dominated exponent-wise
                        if cands.iter().any(|d| dominates(d, &c)) {
                            continue;
                        }
                        cands.retain(|d| !dominates(&c, d));
                        cands.push(c);
                    }
                    if cands.iter().all(|c| c.bits_estimate() <= 4096) {
                        House::Int(cands.iter().map(|c| c.expand(4096).expect("small")).max().expect("nonzero tuple"))
                    } else {
                        House::Factored(cands)
                    }
                })
                .collect(),
        }
    }

    pub fn bits_estimate(&self) -> u64 {
        self.factors
            .iter()
            .flatten()
            .filter_map(|c| self.coord_int(c))
            .map(|x| x.bits_estimate())
            .max()
            .unwrap_or(0)
    }

    pub fn to_point(&self, cap_bits: u64) -> Result<MultiProjPoint> {
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let mut v = Vec::with_capacity(f.len());
            for c in f {
                v.push(match c {
                    FactoredCoord::Zero => BigInt::zero(),
                    FactoredCoord::Unit { negative, .. } => {
                        let m = self.coord_int(c).expect("unit").expand(cap_bits)?;
                        if *negative {
                            -m
                        } else {
                            m
                        }
                    }
                });
            }
            factors.push(v);
        }
        MultiProjPoint::new(factors)
    }
}

fn dominates(a: &FactoredInt, b: &FactoredInt) -> bool {
    a.exps.iter().zip(&b.exps).all(|(x, y)| x >= y)
}

impl fmt::Display for FactoredPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, fac) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, c) in fac.iter().enumerate() {
                if j > 0 {
                    write!(f, ":")?;
                }
                match c {
                    FactoredCoord::Zero => write!(f, "0")?,
                    FactoredCoord::Unit { negative, .. } => {
                        if *negative {
                            write!(f, "-")?;
                        }
                        write!(f, "{}", self.coord_int(c).expect("unit"))?;
                    }
                }
            }
            write!(f, "]")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rint;

    fn ln(x: f64) -> f64 {
        x.ln()
    }

    #[test]
    fn factor_heights_examples() {
        let p = MultiProjPoint::from_i64(&[vec![6, 8]]).unwrap();
        assert_eq!(p.factor(0), &[BigInt::from(3), BigInt::from(4)]);
        assert_eq!(p.heights().int_houses().unwrap(), vec![BigInt::from(4)]);
        let q = MultiProjPoint::from_i64(&[vec![2, 1], vec![3, 1], vec![1, 1]]).unwrap();
        assert_eq!(q.heights().int_houses().unwrap(), vec![BigInt::from(2), BigInt::from(3), BigInt::from(1)]);
        assert!(MultiProjPoint::from_i64(&[vec![0, 0]]).is_err());
        let n = MultiProjPoint::from_i64(&[vec![-2, 4]]).unwrap();
        assert_eq!(n.factor(0), &[BigInt::from(1), BigInt::from(-2)]);
    }

    #[test]
    fn divisor_heights_and_h_plus() {
        let q = MultiProjPoint::from_i64(&[vec![2, 1], vec![3, 1]]).unwrap();
        let w = vec![RationalInterval::point(rint(1)), RationalInterval::point(rint(1))];
        let v = divisor_height(&q.heights(), &w, 60).unwrap();
        assert!((v.mid_f64() - ln(6.0)).abs() < 1e-15);
        assert!(divisor_height(&q.heights(), &w[..1], 60).is_err());
        assert_eq!(h_plus(&RationalInterval::zero()), RationalInterval::point(rint(1)));
        let straddle = RationalInterval::new(rint(0), rint(2));
        assert_eq!(h_plus(&straddle), RationalInterval::new(rint(1), rint(2)));
    }

    #[test]
    fn northcott_counts() {
        let count = |dims: Vec<usize>, b| enumerate_bounded_points(&MultiProjSpace::new(dims).unwrap(), b).count();
        assert_eq!(count(vec![1], 1), 4);
        assert_eq!(count(vec![1], 2), 8);
        assert_eq!(count(vec![1, 1], 1), 16);
        let pts: Vec<_> = enumerate_bounded_points(&MultiProjSpace::new(vec![1]).unwrap(), 1).collect();
        assert!(pts.contains(&MultiProjPoint::from_i64(&[vec![1, -1]]).unwrap()));
    }

    #[test]
    fn large_gcd_agrees() {
        let a = BigInt::from(6).pow(3000u32) * BigInt::from(35);
        let b = BigInt::from(-10).pow(2001u32) * BigInt::from(7);
        assert_eq!(gcd_big(&a, &b), a.gcd(&b));
    }

    #[test]
    fn coprime_base_refines() {
        let b = coprime_base(&[BigInt::from(12), BigInt::from(18), BigInt::from(35)]);
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                assert!(b[i].gcd(&b[j]).is_one());
            }
        }
        for n in [12, 18, 35] {
            assert!(factor_over(&BigInt::from(n), &b).is_some());
        }
    }

    #[test]
    fn factored_round_trip() {
        let p = MultiProjPoint::from_i64(&[vec![12, -18], vec![0, 5], vec![1, 2, 3]]).unwrap();
        let mut f = FactoredPoint::from_point(&p);
        f.normalize();
        assert_eq!(f.to_point(1000).unwrap(), p);
        let (a, b) = (f.heights().factor_logs(60), p.heights().factor_logs(60));
        for (x, y) in a.iter().zip(&b) {
            assert!(x.overlaps(y));
        }
    }
}
