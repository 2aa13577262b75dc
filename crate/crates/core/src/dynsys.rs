//! Explicit dynamical systems over Q with exact iteration: monomial maps on
//! tori, coordinate power maps, Wehler-type (2,2,2) surface automorphisms and
//! products.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactreal::{RationalInterval, RealAlgebraicNumber};
use crate::heights::{divisor_height, h_plus, ExactHeight, FactoredCoord, FactoredPoint, MultiProjPoint, MultiProjSpace};
use crate::linalg::IntMatrix;
use crate::nslattice::{block_product, spectral_radius, PullbackMap, RationalCone, TopIntersectionForm};
use crate::serde_util::BigIntRepr;

pub const DEFAULT_BIT_CAP: u64 = 1_000_000;

/// `x_i ↦ Π_j x_j^{A_ij}` on the torus of `(ℙ¹)ⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSystem {
    a: IntMatrix,
}

impl MonomialSystem {
    pub fn new(a: IntMatrix) -> Result<Self> {
        if !a.is_square() || a.rows() == 0 {
            return Err(Error::invalid("exponent matrix must be square"));
        }
        if a.det_int().is_zero() {
            return Err(Error::invalid("exponent matrix must be nonsingular"));
        }
        if a.to_rows().iter().flatten().any(|x| x.to_i64().map_or(true, |v| v.abs() > 1 << 20)) {
            return Err(Error::invalid("exponent entries must be small integers"));
        }
        Ok(MonomialSystem { a })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows))
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    fn exps(&self) -> Vec<Vec<i64>> {
        self.a
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().expect("checked")).collect())
            .collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        self.a.inverse_unimodular().map(|a| MonomialSystem { a })
    }
}

/// `[x_0 : ... : x_n] ↦ [x_0^d : ... : x_n^d]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSystem {
    degree: u32,
    dim: usize,
}

impl PowerSystem {
    pub fn new(degree: u32, dim: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::invalid("power map degree must be at least 2"));
        }
        if dim == 0 {
            return Err(Error::invalid("projective dimension must be positive"));
        }
        Ok(PowerSystem { degree, dim })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Coefficients `c[i][j][k]` of `Σ c_ijk m_i(x) m_j(y) m_k(z)` with
/// `m_i([u:v]) = u^{2-i} v^i`.
pub type TriQuadratic = [[[BigInt; 3]; 3]; 3];

/// A (2,2,2) surface in `(ℙ¹)³` with its three involutions; `σ_i` swaps the
/// two roots in the `i`-th factor. A word `(i_1, ..., i_r)` acts by applying
/// `σ_{i_1}` first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WehlerSystem {
    coeffs: TriQuadratic,
    word: Vec<usize>,
    involutions: [IntMatrix; 3],
    gram: IntMatrix,
}

pub fn wehler_gram() -> IntMatrix {
    IntMatrix::from_i64(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]])
}

/// `σ_i^*` on `(D₁, D₂, D₃)`: `D_i ↦ -D_i + 2 Σ_{j≠i} D_j`, others fixed.
pub fn wehler_involution_matrices() -> [IntMatrix; 3] {
    [
        IntMatrix::from_i64(&[vec![-1, 0, 0], vec![2, 1, 0], vec![2, 0, 1]]),
        IntMatrix::from_i64(&[vec![1, 2, 0], vec![0, -1, 0], vec![0, 2, 1]]),
        IntMatrix::from_i64(&[vec![1, 0, 2], vec![0, 1, 2], vec![0, 0, -1]]),
    ]
}

impl WehlerSystem {
    pub fn new(coeffs: TriQuadratic, word: Vec<usize>, involutions: [IntMatrix; 3], gram: IntMatrix) -> Result<Self> {
        if word.is_empty() || word.iter().any(|&i| !(1..=3).contains(&i)) {
            return Err(Error::invalid("word letters must be 1, 2 or 3"));
        }
        if coeffs.iter().flatten().flatten().all(|c| c.is_zero()) {
            return Err(Error::invalid("the (2,2,2) form is zero"));
        }
        let id = IntMatrix::identity(3);
        for (i, m) in involutions.iter().enumerate() {
            if m.rows() != 3 || !m.is_square() {
                return Err(Error::invalid("involution matrices must be 3x3"));
            }
            if &(m * m) != &id {
                return Err(Error::InvariantViolation(format!("M{} squared is not the identity", i + 1)));
            }
            if &(&m.transpose() * &gram) * m != gram {
                return Err(Error::InvariantViolation(format!("M{} is not an isometry of the form", i + 1)));
            }
        }
        Ok(WehlerSystem {
            coeffs,
            word,
            involutions,
            gram,
        })
    }

    pub fn standard(coeffs: TriQuadratic, word: Vec<usize>) -> Result<Self> {
        Self::new(coeffs, word, wehler_involution_matrices(), wehler_gram())
    }

    pub fn coeffs_from_i64(c: &[[[i64; 3]; 3]; 3]) -> TriQuadratic {
        std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| BigInt::from(c[i][j][k]))))
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn involutions(&self) -> &[IntMatrix; 3] {
        &self.involutions
    }

    pub fn with_word(&self, word: Vec<usize>) -> Result<Self> {
        Self::new(self.coeffs.clone(), word, self.involutions.clone(), self.gram.clone())
    }

    pub fn inverse(&self) -> Self {
        let mut w = self.word.clone();
        w.reverse();
        WehlerSystem { word: w, ..self.clone() }
    }

    fn check_point(p: &MultiProjPoint) -> Result<()> {
        if p.factors().len() != 3 || p.factors().iter().any(|f| f.len() != 2) {
            return Err(Error::invalid("Wehler points live in (P^1)^3"));
        }
        Ok(())
    }

    fn monomials(f: &[BigInt]) -> [BigInt; 3] {
        [&f[0] * &f[0], &f[0] * &f[1], &f[1] * &f[1]]
    }

    /// Exact value of the (2,2,2) form at `P`.
    pub fn evaluate(&self, p: &MultiProjPoint) -> Result<BigInt> {
        Self::check_point(p)?;
        let [x, y, z] = [0, 1, 2].map(|i| Self::monomials(p.factor(i)));
        let mut s = BigInt::zero();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let c = &self.coeffs[i][j][k];
                    if !c.is_zero() {
                        s += c * &x[i] * &y[j] * &z[k];
                    }
                }
            }
        }
        Ok(s)
    }

    pub fn on_surface(&self, p: &MultiProjPoint) -> Result<bool> {
        Ok(self.evaluate(p)?.is_zero())
    }

    /// `(A, B, C)` of the restriction `A u² + B uv + C v²` to the fiber of
    /// the projection forgetting factor `axis`.
    pub fn axis_quadratic(&self, p: &MultiProjPoint, axis: usize) -> [BigInt; 3] {
        let m: [[BigInt; 3]; 3] = [0, 1, 2].map(|i| Self::monomials(p.factor(i)));
        let (o1, o2) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        std::array::from_fn(|e| {
            let mut s = BigInt::zero();
            for a in 0..3 {
                for b in 0..3 {
                    let mut idx = [0usize; 3];
                    idx[axis] = e;
                    idx[o1] = a;
                    idx[o2] = b;
                    let c = &self.coeffs[idx[0]][idx[1]][idx[2]];
                    if !c.is_zero() {
                        s += c * &m[o1][a] * &m[o2][b];
                    }
                }
            }
            s
        })
    }

    /// Apply a single involution `σ_axis` (1-based).
    pub fn involution(&self, axis: usize, p: &MultiProjPoint) -> Result<MultiProjPoint> {
        self.involution_capped(axis, p, u64::MAX)
    }

    fn involution_capped(&self, axis: usize, p: &MultiProjPoint, cap_bits: u64) -> Result<MultiProjPoint> {
        Self::check_point(p)?;
        if !(1..=3).contains(&axis) {
            return Err(Error::invalid("involution index must be 1, 2 or 3"));
        }
        let [a, b, c] = self.axis_quadratic(p, axis - 1);
        let f = p.factor(axis - 1);
        // the unreduced image has about this many bits; reducing it is the
        // expensive step
        let est = a.bits().max(b.bits()).max(c.bits()) + f[0].bits().max(f[1].bits());
        if est > cap_bits.saturating_add(64) {
            check_cap(est - 64, cap_bits)?;
        }
        let other = vieta_other_root(&a, &b, &c, (&f[0], &f[1]))?;
        let mut factors = p.factors().to_vec();
        factors[axis - 1] = other;
        MultiProjPoint::new(factors)
    }

    pub fn apply(&self, p: &MultiProjPoint) -> Result<MultiProjPoint> {
        self.apply_capped(p, u64::MAX)
    }

    pub fn apply_capped(&self, p: &MultiProjPoint, cap_bits: u64) -> Result<MultiProjPoint> {
        let mut q = p.clone();
        for &i in &self.word {
            q = self.involution_capped(i, &q, cap_bits)?;
        }
        Ok(q)
    }

    pub fn pullback(&self) -> Result<PullbackMap> {
        let mut m = IntMatrix::identity(3);
        for &i in &self.word {
            m = &m * &self.involutions[i - 1];
        }
        PullbackMap::automorphism(m)
    }

    pub fn form(&self) -> Result<TopIntersectionForm> {
        TopIntersectionForm::from_gram(&self.gram.to_rational())
    }
}

/// The other root of `A u² + B uv + C v²` given the root `[u : v]`.
pub fn vieta_other_root(a: &BigInt, b: &BigInt, c: &BigInt, root: (&BigInt, &BigInt)) -> Result<Vec<BigInt>> {
    let (u, v) = root;
    if u.is_zero() && v.is_zero() {
        return Err(Error::invalid("zero root tuple"));
    }
    if !(a * u * u + b * u * v + c * v * v).is_zero() {
        return Err(Error::precondition(format!("[{u}:{v}] is not a root of ({a}, {b}, {c})")));
    }
    let candidates = [
        // product of roots C/A
        [c * v, a * u],
        // sum of roots -B/A
        [-(b * v) - a * u, a * v],
        // A = 0 with the root at infinity: the finite root -C/B
        [-c.clone(), b.clone()],
    ];
    for cand in candidates {
        if !(cand[0].is_zero() && cand[1].is_zero()) {
            return crate::heights::normalize_tuple(&cand);
        }
    }
    Err(Error::DegenerateFiber(format!(
        "the fiber through [{u}:{v}] lies on the surface (A = B = C = 0)"
    )))
}

/// `f × g` acting factor-wise; the projection to the left factor is
/// equivariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSystem {
    pub left: System,
    pub right: System,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum System {
    Monomial(MonomialSystem),
    Power(PowerSystem),
    Wehler(WehlerSystem),
    Product(Box<ProductSystem>),
}

impl System {
    pub fn product(left: System, right: System) -> Self {
        System::Product(Box::new(ProductSystem { left, right }))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            System::Monomial(_) => "monomial",
            System::Power(_) => "power",
            System::Wehler(_) => "wehler",
            System::Product(_) => "product",
        }
    }

    pub fn space(&self) -> MultiProjSpace {
        match self {
            System::Monomial(m) => MultiProjSpace::p1_power(m.dim()),
            System::Power(p) => MultiProjSpace {
                factor_dims: vec![p.dim],
            },
            System::Wehler(_) => MultiProjSpace::p1_power(3),
            System::Product(p) => {
                let mut d = p.left.space().factor_dims;
                d.extend(p.right.space().factor_dims);
                MultiProjSpace { factor_dims: d }
            }
        }
    }

    pub fn factor_count(&self) -> usize {
        self.space().factors()
    }

    /// Rank of the lattice the pullback acts on.
    pub fn rank(&self) -> usize {
        match self {
            System::Monomial(m) => m.dim(),
            System::Power(_) => 1,
            System::Wehler(_) => 3,
            System::Product(p) => p.left.rank() + p.right.rank(),
        }
    }

    pub fn is_automorphism(&self) -> bool {
        match self {
            System::Wehler(_) => true,
            System::Product(p) => p.left.is_automorphism() && p.right.is_automorphism(),
            _ => false,
        }
    }

    /// Whether the orbit can be tracked in factored form.
    pub fn is_multiplicative(&self) -> bool {
        match self {
            System::Monomial(_) | System::Power(_) => true,
            System::Wehler(_) => false,
            System::Product(p) => p.left.is_multiplicative() && p.right.is_multiplicative(),
        }
    }

    pub fn inverse(&self) -> Result<System> {
        match self {
            System::Wehler(w) => Ok(System::Wehler(w.inverse())),
            System::Monomial(m) => m
                .inverse()
                .map(System::Monomial)
                .ok_or_else(|| Error::precondition("monomial map with non-unimodular matrix has no monomial inverse")),
            System::Power(_) => Err(Error::precondition("power maps are not invertible")),
            System::Product(p) => Ok(System::product(p.left.inverse()?, p.right.inverse()?)),
        }
    }

    /// Pullback on the factor-class basis. For monomial maps `h_D(f P)`
    /// grows like `h_{Aᵀ a}(P)`, so the column convention stores `Aᵀ`.
    pub fn pullback_matrix(&self) -> Result<PullbackMap> {
        match self {
            System::Monomial(m) => PullbackMap::new(m.a.transpose(), m.a.det_int().abs(), false),
            System::Power(p) => PullbackMap::new(
                IntMatrix::from_rows(vec![vec![BigInt::from(p.degree)]])?,
                BigInt::from(p.degree).pow(p.dim as u32),
                false,
            ),
            System::Wehler(w) => w.pullback(),
            System::Product(p) => block_product(&p.left.pullback_matrix()?, &p.right.pullback_matrix()?),
        }
    }

    /// Classes `(a_1, ..., a_k)` on the factor hyperplanes for a lattice
    /// vector; for products of power maps the rank-one blocks already
    /// coincide with factors.
    pub fn lambda1(&self) -> Result<RealAlgebraicNumber> {
        spectral_radius(&self.pullback_matrix()?)
    }

    pub fn check_locus(&self, p: &MultiProjPoint) -> Result<()> {
        if !self.space().contains(p) {
            return Err(Error::invalid(format!("point {p} is not in the ambient space of the {} system", self.kind())));
        }
        match self {
            System::Monomial(_) => {
                if p.factors().iter().any(|f| f[0].is_zero() || f[1].is_zero()) {
                    return Err(Error::Domain(format!("point {p} is off the torus")));
                }
                Ok(())
            }
            System::Power(_) => Ok(()),
            System::Wehler(w) => {
                if !w.on_surface(p)? {
                    return Err(Error::Domain(format!("point {p} is not on the surface")));
                }
                Ok(())
            }
            System::Product(s) => {
                let (l, r) = split_point(p, s.left.factor_count())?;
                s.left.check_locus(&l)?;
                s.right.check_locus(&r)
            }
        }
    }

    pub fn apply(&self, p: &MultiProjPoint) -> Result<MultiProjPoint> {
        self.apply_capped(p, u64::MAX)
    }

    pub fn apply_capped(&self, p: &MultiProjPoint, cap_bits: u64) -> Result<MultiProjPoint> {
        self.check_locus(p)?;
        let q = match self {
            System::Monomial(m) => apply_monomial_explicit(m, p, cap_bits)?,
            System::Power(s) => {
                let est = p.max_bits().saturating_mul(s.degree as u64);
                check_cap(est, cap_bits)?;
                MultiProjPoint::new(vec![p.factor(0).iter().map(|x| x.pow(s.degree)).collect()])?
            }
            System::Wehler(w) => w.apply_capped(p, cap_bits)?,
            System::Product(s) => {
                let (l, r) = split_point(p, s.left.factor_count())?;
                s.left.apply_capped(&l, cap_bits)?.concat(&s.right.apply_capped(&r, cap_bits)?)
            }
        };
        check_cap(q.max_bits(), cap_bits)?;
        Ok(q)
    }

    fn apply_factored(&self, fp: &mut FactoredPoint, offset: usize) {
        match self {
            System::Monomial(m) => {
                let a = m.exps();
                let n = m.dim();
                let k = fp.atoms.len();
                let mut logs: Vec<(bool, Vec<BigInt>)> = Vec::with_capacity(n);
                for i in 0..n {
                    let f = &fp.factors[offset + i];
                    match (&f[0], &f[1]) {
                        (
                            FactoredCoord::Unit { negative: s0, exps: e0 },
                            FactoredCoord::Unit { negative: s1, exps: e1 },
                        ) => logs.push((s0 ^ s1, e0.iter().zip(e1).map(|(x, y)| x - y).collect())),
                        _ => unreachable!("torus checked before iterating"),
                    }
                }
                for i in 0..n {
                    let mut e = vec![BigInt::zero(); k];
                    let mut neg = false;
                    for j in 0..n {
                        let c = a[i][j];
                        if c == 0 {
                            continue;
                        }
                        let cb = BigInt::from(c);
                        for (t, x) in e.iter_mut().zip(&logs[j].1) {
                            *t += &cb * x;
                        }
                        neg ^= logs[j].0 && c.rem_euclid(2) == 1;
                    }
                    let pos: Vec<BigInt> = e.iter().map(|x| if x.is_positive() { x.clone() } else { BigInt::zero() }).collect();
                    let negp: Vec<BigInt> = e.iter().map(|x| if x.is_negative() { -x } else { BigInt::zero() }).collect();
                    fp.factors[offset + i] = vec![
                        FactoredCoord::Unit { negative: neg, exps: pos },
                        FactoredCoord::Unit { negative: false, exps: negp },
                    ];
                }
            }
            System::Power(s) => {
                let d = BigInt::from(s.degree);
                let odd = s.degree % 2 == 1;
                for c in fp.factors[offset].iter_mut() {
                    if let FactoredCoord::Unit { negative, exps } = c {
                        *negative &= odd;
                        for e in exps.iter_mut() {
                            *e *= &d;
                        }
                    }
                }
            }
            System::Wehler(_) => unreachable!("Wehler orbits are explicit"),
            System::Product(p) => {
                p.left.apply_factored(fp, offset);
                p.right.apply_factored(fp, offset + p.left.factor_count());
            }
        }
    }
}

fn check_cap(bits: u64, cap: u64) -> Result<()> {
    if bits > cap {
        return Err(Error::ResourceLimit(format!(
            "coordinate size of {bits} bits exceeds cap of {cap}"
        )));
    }
    Ok(())
}

fn split_point(p: &MultiProjPoint, k: usize) -> Result<(MultiProjPoint, MultiProjPoint)> {
    let n = p.factors().len();
    Ok((p.project(&(0..k).collect::<Vec<_>>())?, p.project(&(k..n).collect::<Vec<_>>())?))
}

fn apply_monomial_explicit(m: &MonomialSystem, p: &MultiProjPoint, cap_bits: u64) -> Result<MultiProjPoint> {
    let a = m.exps();
    let est = a
        .iter()
        .map(|row| {
            row.iter()
                .zip(p.factors())
                .map(|(e, f)| (e.unsigned_abs()).saturating_mul(f[0].bits().max(f[1].bits())))
                .fold(0u64, |s, b| s.saturating_add(b))
        })
        .max()
        .unwrap_or(0);
    check_cap(est, cap_bits)?;
    let xs: Vec<BigRational> = p
        .factors()
        .iter()
        .map(|f| BigRational::new(f[0].clone(), f[1].clone()))
        .collect();
    let ys: Vec<BigRational> = a
        .iter()
        .map(|row| {
            row.iter().zip(&xs).fold(BigRational::one(), |acc, (&e, x)| {
                let base = if e >= 0 { x.clone() } else { x.recip() };
                acc * pow_rat(&base, e.unsigned_abs() as u32)
            })
        })
        .collect();
    MultiProjPoint::from_affine(&ys)
}

fn pow_rat(x: &BigRational, k: u32) -> BigRational {
    BigRational::new_raw(x.numer().pow(k), x.denom().pow(k))
}

/// Orbit point, either written out or kept in factored form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitPoint {
    Explicit(MultiProjPoint),
    Factored(FactoredPoint),
}

impl OrbitPoint {
    pub fn heights(&self) -> ExactHeight {
        match self {
            OrbitPoint::Explicit(p) => p.heights(),
            OrbitPoint::Factored(f) => f.heights(),
        }
    }

    pub fn explicit(&self, cap_bits: u64) -> Result<MultiProjPoint> {
        match self {
            OrbitPoint::Explicit(p) => Ok(p.clone()),
            OrbitPoint::Factored(f) => f.to_point(cap_bits),
        }
    }

    /// Project onto the first `k` factors.
    pub fn project_prefix(&self, k: usize) -> Result<OrbitPoint> {
        match self {
            OrbitPoint::Explicit(p) => Ok(OrbitPoint::Explicit(p.project(&(0..k).collect::<Vec<_>>())?)),
            OrbitPoint::Factored(f) => Ok(OrbitPoint::Factored(FactoredPoint {
                atoms: f.atoms.clone(),
                factors: f.factors[..k].to_vec(),
            })),
        }
    }
}

impl fmt::Display for OrbitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitPoint::Explicit(p) => write!(f, "{p}"),
            OrbitPoint::Factored(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitEntry {
    pub n: i64,
    pub point: OrbitPoint,
    pub heights: ExactHeight,
    /// `h_{O(1,...,1)}` as the sum of factor heights.
    pub h: RationalInterval,
    pub h_plus: RationalInterval,
    /// `h_D` for each requested class.
    pub class_heights: Vec<RationalInterval>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub entries: Vec<OrbitEntry>,
    /// Set when iteration stopped before the requested length.
    pub stopped: Option<Error>,
    pub log_bits: u32,
}

impl OrbitRecord {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> &OrbitEntry {
        self.entries.last().expect("orbit records start with the initial point")
    }

    pub fn complete(&self) -> bool {
        self.stopped.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct OrbitOptions {
    pub cap_bits: u64,
    pub log_bits: u32,
    /// Weights on factor classes, one vector per requested divisor class.
    pub classes: Vec<Vec<RationalInterval>>,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            cap_bits: DEFAULT_BIT_CAP,
            log_bits: crate::heights::DEFAULT_LOG_BITS,
            classes: Vec::new(),
        }
    }
}

fn entry(n: i64, point: OrbitPoint, opts: &OrbitOptions) -> Result<OrbitEntry> {
    let heights = point.heights();
    let h = heights.total(opts.log_bits);
    let class_heights = opts
        .classes
        .iter()
        .map(|c| divisor_height(&heights, c, opts.log_bits))
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitEntry {
        n,
        point,
        h_plus: h_plus(&h),
        h,
        heights,
        class_heights,
    })
}

/// Weights of a lattice class on the factor hyperplane classes.
pub fn factor_weights(system: &System, class: &[RationalInterval]) -> Result<Vec<RationalInterval>> {
    if class.len() != system.rank() {
        return Err(Error::invalid(format!(
            "class has {} coordinates, lattice rank is {}",
            class.len(),
            system.rank()
        )));
    }
    // every implemented lattice basis is the list of factor hyperplanes
    Ok(class.to_vec())
}

/// Exact orbit `f^0 P, ..., f^N P` (or `f^0 P, f^{-1} P, ...` for negative
/// `N`), stopping with a partial record on failure.
pub fn iterate_orbit(system: &System, p: &MultiProjPoint, steps: i64, opts: &OrbitOptions) -> Result<OrbitRecord> {
    system.check_locus(p)?;
    for c in &opts.classes {
        factor_weights(system, c)?;
    }
    let (map, sign) = if steps < 0 { (system.inverse()?, -1) } else { (system.clone(), 1) };
    let count = steps.unsigned_abs();
    let mut record = OrbitRecord {
        entries: Vec::with_capacity(count as usize + 1),
        stopped: None,
        log_bits: opts.log_bits,
    };
    if map.is_multiplicative() {
        let mut fp = FactoredPoint::from_point(p);
        fp.normalize();
        record.entries.push(entry(0, OrbitPoint::Factored(fp.clone()), opts)?);
        for k in 1..=count {
            map.apply_factored(&mut fp, 0);
            fp.normalize();
            record.entries.push(entry(sign * k as i64, OrbitPoint::Factored(fp.clone()), opts)?);
        }
    } else {
        let mut q = p.clone();
        record.entries.push(entry(0, OrbitPoint::Explicit(q.clone()), opts)?);
        for k in 1..=count {
            match map.apply_capped(&q, opts.cap_bits) {
                Ok(next) => q = next,
                Err(e @ (Error::DegenerateFiber(_) | Error::ResourceLimit(_))) => {
                    record.stopped = Some(e);
                    break;
                }
                Err(e) => return Err(e),
            }
            record.entries.push(entry(sign * k as i64, OrbitPoint::Explicit(q.clone()), opts)?);
        }
    }
    Ok(record)
}

/// Config document for a system.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemDoc {
    Monomial {
        matrix: Vec<Vec<i64>>,
    },
    Power {
        degree: u32,
        dim: usize,
    },
    Wehler {
        coeffs: [[[BigIntRepr; 3]; 3]; 3],
        word: Vec<usize>,
        #[serde(default)]
        pullback_matrices: Option<[Vec<Vec<i64>>; 3]>,
        #[serde(default)]
        gram: Option<Vec<Vec<i64>>>,
        /// Stand-in nef cone for the eigenvector pair.
        #[serde(default)]
        cone: Option<RationalCone>,
    },
    Product {
        left: Box<SystemDoc>,
        right: Box<SystemDoc>,
    },
}

impl SystemDoc {
    pub fn build(&self) -> Result<System> {
        match self {
            SystemDoc::Monomial { matrix } => {
                check_rect(matrix)?;
                Ok(System::Monomial(MonomialSystem::from_i64(matrix)?))
            }
            SystemDoc::Power { degree, dim } => Ok(System::Power(PowerSystem::new(*degree, *dim)?)),
            SystemDoc::Wehler {
                coeffs,
                word,
                pullback_matrices,
                gram,
                ..
            } => {
                let c: TriQuadratic = std::array::from_fn(|i| {
                    std::array::from_fn(|j| std::array::from_fn(|k| coeffs[i][j][k].0.clone()))
                });
                let inv = match pullback_matrices {
                    Some(ms) => {
                        for m in ms {
                            check_rect(m)?;
                        }
                        [0, 1, 2].map(|i| IntMatrix::from_i64(&ms[i]))
                    }
                    None => wehler_involution_matrices(),
                };
                let g = match gram {
                    Some(g) => {
                        check_rect(g)?;
                        IntMatrix::from_i64(g)
                    }
                    None => wehler_gram(),
                };
                Ok(System::Wehler(WehlerSystem::new(c, word.clone(), inv, g)?))
            }
            SystemDoc::Product { left, right } => Ok(System::product(left.build()?, right.build()?)),
        }
    }

    pub fn cone(&self) -> Option<&RationalCone> {
        match self {
            SystemDoc::Wehler { cone, .. } => cone.as_ref(),
            _ => None,
        }
    }
}

fn check_rect(m: &[Vec<i64>]) -> Result<()> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("expected a nonempty square integer matrix"));
    }
    Ok(())
}
