//! Lattice model of divisor classes: top intersection forms, pullback maps,
//! cones, spectral radii and leading eigenvectors.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactreal::{largest_abs_real_root, IntPolynomial, RatPolynomial, RationalInterval, RealAlgebraicNumber};
use crate::linalg::{IntMatrix, RatMatrix};
use crate::scalar::Scalar;
use crate::serde_util::{BigIntRepr, RationalRepr};

/// Default refinement ceiling for certification loops.
pub const MAX_REFINE_BITS: u32 = 256;

fn dyadic(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits as usize)
}

/// Three-valued answer for checks that may fail to certify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    pub fn is_true(self) -> bool {
        self == Verdict::True
    }
}

/// A divisor class with enclosed coordinates in a fixed basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorClass {
    pub coords: Vec<RationalInterval>,
}

impl DivisorClass {
    pub fn from_rationals(v: &[BigRational]) -> Self {
        DivisorClass {
            coords: v.iter().cloned().map(RationalInterval::point).collect(),
        }
    }

    pub fn from_i64(v: &[i64]) -> Self {
        DivisorClass {
            coords: v.iter().map(|&x| RationalInterval::from_int(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        DivisorClass {
            coords: self.coords.iter().map(|x| x.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        DivisorClass {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn max_width(&self) -> BigRational {
        self.coords
            .iter()
            .map(|c| c.width())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn mid_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.mid_f64()).collect()
    }
}

/// Symmetric d-linear form on a rank-ρ lattice, stored by sorted index multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopIntersectionForm {
    rank: usize,
    dim: usize,
    values: BTreeMap<Vec<usize>, BigRational>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormEntry {
    pub indices: Vec<usize>,
    pub value: RationalRepr,
}

impl TopIntersectionForm {
    pub fn new(rank: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("form degree must be at least 1"));
        }
        Ok(TopIntersectionForm {
            rank,
            dim,
            values: BTreeMap::new(),
        })
    }

    /// Build from entries; every permutation of an index tuple must carry
    /// the same value if repeated.
    pub fn from_entries(rank: usize, dim: usize, entries: &[FormEntry]) -> Result<Self> {
        let mut f = Self::new(rank, dim)?;
        for e in entries {
            if e.indices.len() != dim || e.indices.iter().any(|&i| i >= rank) {
                return Err(Error::invalid(format!("bad form indices {:?}", e.indices)));
            }
            let mut key = e.indices.clone();
            key.sort_unstable();
            if let Some(old) = f.values.get(&key) {
                if old != &e.value.0 {
                    return Err(Error::invalid(format!("asymmetric form entry at {:?}", e.indices)));
                }
            }
            f.set(&key, e.value.0.clone());
        }
        Ok(f)
    }

    /// The bilinear form of a symmetric Gram matrix.
    pub fn from_gram(gram: &RatMatrix) -> Result<Self> {
        if !gram.is_square() || gram.transpose() != *gram {
            return Err(Error::invalid("Gram matrix must be square and symmetric"));
        }
        let n = gram.rows();
        let mut f = Self::new(n, 2)?;
        for i in 0..n {
            for j in i..n {
                f.set(&[i, j], gram[(i, j)].clone());
            }
        }
        Ok(f)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, indices: &[usize], value: BigRational) {
        let mut key = indices.to_vec();
        key.sort_unstable();
        if value.is_zero() {
            self.values.remove(&key);
        } else {
            self.values.insert(key, value);
        }
    }

    pub fn value(&self, indices: &[usize]) -> BigRational {
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.values.get(&key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn entries(&self) -> Vec<FormEntry> {
        self.values
            .iter()
            .map(|(k, v)| FormEntry {
                indices: k.clone(),
                value: RationalRepr(v.clone()),
            })
            .collect()
    }

    /// All sorted index multisets of size `dim`.
    pub fn multisets(&self) -> Vec<Vec<usize>> {
        fn rec(rank: usize, left: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for i in start..rank {
                cur.push(i);
                rec(rank, left - 1, i, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(self.rank, self.dim, 0, &mut Vec::new(), &mut out);
        out
    }

    /// `T(v_1, ..., v_d)` over any ring, with form values embedded by `embed`.
    pub fn eval_with<S: Scalar>(&self, vecs: &[&[S]], embed: impl Fn(&BigRational) -> S) -> S {
        assert_eq!(vecs.len(), self.dim, "wrong number of arguments");
        let mut total = S::zero();
        let mut idx = vec![0usize; self.dim];
        loop {
            let mut coeff: Option<S> = None;
            for (k, &i) in idx.iter().enumerate() {
                let c = &vecs[k][i];
                if c.is_zero() {
                    coeff = None;
                    break;
                }
                coeff = Some(match coeff {
                    None => c.clone(),
                    Some(acc) => acc * c.clone(),
                });
            }
            if let Some(c) = coeff {
                let v = self.value(&idx);
                if !v.is_zero() {
                    total = total + embed(&v) * c;
                }
            }
            // advance odometer
            let mut k = 0;
            loop {
                if k == self.dim {
                    return total;
                }
                idx[k] += 1;
                if idx[k] < self.rank {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    pub fn eval_rational(&self, vecs: &[&[BigRational]]) -> BigRational {
        self.eval_with(vecs, |v| v.clone())
    }

    pub fn eval_interval(&self, vecs: &[&[RationalInterval]]) -> RationalInterval {
        self.eval_with(vecs, |v| RationalInterval::point(v.clone()))
    }

    pub fn eval_poly(&self, vecs: &[&[RatPolynomial]]) -> RatPolynomial {
        self.eval_with(vecs, |v| RatPolynomial::constant(v.clone()))
    }

    /// `T(v, ..., v)`.
    pub fn self_power(&self, v: &[BigRational]) -> BigRational {
        let args: Vec<&[BigRational]> = (0..self.dim).map(|_| v).collect();
        self.eval_rational(&args)
    }

    pub fn self_power_interval(&self, v: &[RationalInterval]) -> RationalInterval {
        let args: Vec<&[RationalInterval]> = (0..self.dim).map(|_| v).collect();
        self.eval_interval(&args)
    }

    /// `T(a^j, b^(d-j))` on enclosures.
    pub fn mixed_interval(&self, a: &[RationalInterval], b: &[RationalInterval], j: usize) -> RationalInterval {
        let args: Vec<&[RationalInterval]> = (0..self.dim).map(|k| if k < j { a } else { b }).collect();
        self.eval_interval(&args)
    }
}

/// Pullback action on N¹ in a fixed basis: column `j` holds `f^*(e_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullbackMap {
    pub matrix: IntMatrix,
    pub mapping_degree: BigIntRepr,
    pub is_automorphism: bool,
}

impl PullbackMap {
    pub fn new(matrix: IntMatrix, mapping_degree: BigInt, is_automorphism: bool) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("pullback matrix must be square"));
        }
        if !mapping_degree.is_positive() {
            return Err(Error::invalid("mapping degree must be positive"));
        }
        if is_automorphism && !matrix.is_unimodular() {
            return Err(Error::invalid("automorphism pullback must have determinant ±1"));
        }
        Ok(PullbackMap {
            matrix,
            mapping_degree: BigIntRepr(mapping_degree),
            is_automorphism,
        })
    }

    pub fn automorphism(matrix: IntMatrix) -> Result<Self> {
        Self::new(matrix, BigInt::one(), true)
    }

    pub fn morphism(matrix: IntMatrix, degree: BigInt) -> Result<Self> {
        Self::new(matrix, degree, false)
    }

    pub fn from_i64(rows: &[Vec<i64>], degree: i64, is_automorphism: bool) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows), BigInt::from(degree), is_automorphism)
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn degree(&self) -> &BigInt {
        &self.mapping_degree.0
    }

    /// Pullback by the inverse map.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_automorphism {
            return Err(Error::precondition("inverse pullback needs an automorphism"));
        }
        let inv = self
            .matrix
            .inverse_unimodular()
            .ok_or_else(|| Error::InvariantViolation("unimodular matrix without integer inverse".into()))?;
        Self::automorphism(inv)
    }

    /// `(f∘g)^* = g^* f^*`; `self` is `f`.
    pub fn compose_after(&self, g: &Self) -> Result<Self> {
        Self::new(
            &g.matrix * &self.matrix,
            self.degree() * g.degree(),
            self.is_automorphism && g.is_automorphism,
        )
    }

    /// Exact check of `T(M e_{i1}, ..., M e_{id}) = e · T(e_{i1}, ..., e_{id})`.
    pub fn preserves_form(&self, form: &TopIntersectionForm) -> bool {
        if form.rank() != self.rank() {
            return false;
        }
        let cols: Vec<Vec<BigRational>> = (0..self.rank())
            .map(|j| {
                self.matrix
                    .col(j)
                    .into_iter()
                    .map(BigRational::from_integer)
                    .collect()
            })
            .collect();
        let e = BigRational::from_integer(self.degree().clone());
        form.multisets().iter().all(|ms| {
            let args: Vec<&[BigRational]> = ms.iter().map(|&i| cols[i].as_slice()).collect();
            form.eval_rational(&args) == &e * form.value(ms)
        })
    }
}

/// Spectral radius of an integer matrix as an exact real algebraic number.
///
/// The square of the radius is the largest absolute value among the real
/// eigenvalues of the symmetric square (products `z_i z_j` include `|z|^2`).
/// When a real eigenvalue of the matrix itself attains the radius, that
/// eigenvalue's smaller defining polynomial is returned.
pub fn spectral_radius_matrix(m: &IntMatrix) -> Result<RealAlgebraicNumber> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::invalid("spectral radius needs a nonempty square matrix"));
    }
    let max_abs_real = largest_abs_real_root(&m.charpoly())?;
    if m.rows() == 1 {
        return Ok(max_abs_real.expect("linear charpoly has a root"));
    }
    let rho_sq = largest_abs_real_root(&m.sym_square().charpoly())?
        .expect("symmetric square of a real matrix has the real eigenvalue |z|^2");
    if rho_sq.signum() == Ordering::Equal {
        return Ok(RealAlgebraicNumber::from_int(0));
    }
    let rho = rho_sq.kth_root(2)?;
    match max_abs_real {
        Some(r) if r.cmp_value(&rho) == Ordering::Equal => Ok(r),
        _ => Ok(rho),
    }
}

pub fn spectral_radius(m: &PullbackMap) -> Result<RealAlgebraicNumber> {
    spectral_radius_matrix(&m.matrix)
}

/// Finitely generated rational cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalCone {
    generators: Vec<Vec<BigRational>>,
}

impl RationalCone {
    pub fn new(generators: Vec<Vec<BigRational>>) -> Result<Self> {
        let dim = generators.first().map_or(0, |g| g.len());
        if generators.is_empty() || dim == 0 {
            return Err(Error::invalid("cone needs at least one generator"));
        }
        if generators.iter().any(|g| g.len() != dim) {
            return Err(Error::invalid("cone generators of different lengths"));
        }
        if generators.iter().any(|g| g.iter().all(|x| x.is_zero())) {
            return Err(Error::invalid("zero cone generator"));
        }
        let cone = RationalCone { generators };
        if !cone.is_pointed() {
            return Err(Error::invalid("cone is not pointed"));
        }
        Ok(cone)
    }

    pub fn from_i64(gens: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            gens.iter()
                .map(|g| g.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    /// The cone spanned by the standard basis vectors.
    pub fn positive_orthant(dim: usize) -> Self {
        RationalCone {
            generators: (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn generators(&self) -> &[Vec<BigRational>] {
        &self.generators
    }

    pub fn ambient_dim(&self) -> usize {
        self.generators[0].len()
    }

    fn generator_matrix(&self, subset: &[usize]) -> RatMatrix {
        let n = self.ambient_dim();
        let mut m = RatMatrix::zeros(n, subset.len());
        for (c, &g) in subset.iter().enumerate() {
            for r in 0..n {
                m[(r, c)] = self.generators[g][r].clone();
            }
        }
        m
    }

    pub fn is_full_dimensional(&self) -> bool {
        let all: Vec<usize> = (0..self.generators.len()).collect();
        self.generator_matrix(&all).rank() == self.ambient_dim()
    }

    /// Simplicial subcones spanned by `n` independent generators, with the
    /// inverse of their generator matrix.
    fn simplicial_pieces(&self) -> Vec<RatMatrix> {
        let n = self.ambient_dim();
        let mut out = Vec::new();
        for subset in combinations(self.generators.len(), n) {
            if let Some(inv) = self.generator_matrix(&subset).inverse() {
                out.push(inv);
            }
        }
        out
    }

    /// Exact membership of a rational vector (Carathéodory).
    pub fn contains(&self, v: &[BigRational]) -> bool {
        let n = self.ambient_dim();
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        let rank_all = {
            let all: Vec<usize> = (0..self.generators.len()).collect();
            self.generator_matrix(&all).rank()
        };
        for subset in combinations(self.generators.len(), rank_all) {
            let g = self.generator_matrix(&subset);
            if g.rank() < rank_all {
                continue;
            }
            let mut aug = RatMatrix::zeros(n, rank_all + 1);
            for r in 0..n {
                for c in 0..rank_all {
                    aug[(r, c)] = g[(r, c)].clone();
                }
                aug[(r, rank_all)] = v[r].clone();
            }
            let (red, pivots) = aug.rref();
            if pivots.contains(&rank_all) {
                continue;
            }
            if (0..rank_all).all(|row| !red[(row, rank_all)].is_negative()) {
                return true;
            }
        }
        false
    }

    /// Exact membership of a vector whose coordinates are `p_i(λ)`.
    /// Requires a full-dimensional cone.
    pub fn contains_algebraic(&self, coords: &[IntPolynomial], lambda: &RealAlgebraicNumber) -> bool {
        let vpoly: Vec<RatPolynomial> = coords.iter().map(|p| p.to_rational()).collect();
        self.simplicial_pieces().iter().any(|inv| {
            (0..inv.rows()).all(|r| {
                let mut acc = RatPolynomial::zero();
                for c in 0..inv.cols() {
                    acc = acc + vpoly[c].scale(&inv[(r, c)]);
                }
                lambda.sign_of(&IntPolynomial::from_rational(&acc)) != Ordering::Less
            })
        })
    }

    pub fn is_pointed(&self) -> bool {
        !self.generators.iter().any(|g| {
            let neg: Vec<BigRational> = g.iter().map(|x| -x.clone()).collect();
            self.contains(&neg)
        })
    }

    /// Whether `M` maps every generator into the cone.
    pub fn is_invariant_under(&self, m: &IntMatrix) -> bool {
        let mr = m.to_rational();
        self.generators.iter().all(|g| self.contains(&mr.mul_vec(g)))
    }
}

impl Serialize for RationalCone {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let g: Vec<Vec<RationalRepr>> = self
            .generators
            .iter()
            .map(|v| v.iter().cloned().map(RationalRepr).collect())
            .collect();
        g.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalCone {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let g: Vec<Vec<RationalRepr>> = Vec::deserialize(d)?;
        RationalCone::new(g.into_iter().map(|v| v.into_iter().map(|x| x.0).collect()).collect())
            .map_err(serde::de::Error::custom)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(n, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// A leading eigenvector known exactly as `v_i = p_i(λ)` plus a normalized
/// enclosure. The sup-norm normalization divides by `|p_k(λ)|`.
#[derive(Clone, Debug, Serialize)]
pub struct EigenDirection {
    pub lambda: RealAlgebraicNumber,
    #[serde(skip)]
    exact: Vec<IntPolynomial>,
    /// Index of the coordinate used for normalization.
    pub norm_index: usize,
    /// Sign of `p_k(λ)`.
    #[serde(skip)]
    norm_sign: i8,
    pub class: DivisorClass,
    pub residual: RationalInterval,
    pub cone_invariant: bool,
}

impl EigenDirection {
    pub fn exact_coords(&self) -> &[IntPolynomial] {
        &self.exact
    }

    /// `|p_k(t)|` as a polynomial, i.e. the positive normalizer.
    pub(crate) fn normalizer(&self) -> IntPolynomial {
        let p = self.exact[self.norm_index].clone();
        if self.norm_sign < 0 {
            -p
        } else {
            p
        }
    }

    /// Normalized enclosure at a finer refinement level.
    pub fn enclosure_at(&self, bits: u32) -> DivisorClass {
        let mut b = bits;
        loop {
            let fine = self.lambda.refined(&dyadic(b));
            if let Some(c) = normalized_enclosure(&self.exact, &fine, self.norm_index, self.norm_sign) {
                return c;
            }
            b += 16;
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.class.mid_f64()
    }
}

fn normalized_enclosure(
    exact: &[IntPolynomial],
    lambda: &RealAlgebraicNumber,
    k: usize,
    sign: i8,
) -> Option<DivisorClass> {
    let iv = lambda.interval();
    let mut denom = exact[k].eval_interval(iv);
    if sign < 0 {
        denom = -denom;
    }
    let coords = exact
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if i == k {
                Some(RationalInterval::from_int(sign as i64))
            } else {
                p.eval_interval(iv).div(&denom)
            }
        })
        .collect::<Option<Vec<_>>>()?;
    Some(DivisorClass { coords })
}

fn residual_norm(m: &IntMatrix, lambda: &RationalInterval, v: &DivisorClass) -> RationalInterval {
    let mi = m.map(|x| RationalInterval::point(BigRational::from_integer(x.clone())));
    let mv = mi.mul_vec(&v.coords);
    let mut worst = RationalInterval::zero();
    for (a, b) in mv.into_iter().zip(&v.coords) {
        let r = (a - lambda.clone() * b.clone()).abs();
        worst = worst.max(&r);
    }
    worst
}

/// Exact eigenvector coordinates `p_i(λ)` for the eigenvalue `lambda` of `m`.
fn exact_eigenvector(m: &IntMatrix, lambda: &RealAlgebraicNumber, cone: &RationalCone) -> Result<Vec<IntPolynomial>> {
    let n = m.rows();
    if let Some(r) = lambda.as_rational() {
        let shifted = m.to_rational() - RatMatrix::scalar(n, r.clone());
        let basis = shifted.nullspace();
        let pick = match basis.len() {
            0 => return Err(Error::InvariantViolation("eigenvalue with trivial eigenspace".into())),
            1 => basis[0].clone(),
            _ => cone
                .generators()
                .iter()
                .find(|g| shifted.mul_vec(g).iter().all(|x| x.is_zero()))
                .cloned()
                .ok_or_else(|| {
                    Error::precondition("eigenspace has dimension > 1 and contains no cone generator")
                })?,
        };
        let lcm = pick
            .iter()
            .fold(BigInt::one(), |l, c| num_integer::Integer::lcm(&l, c.denom()));
        return Ok(pick
            .iter()
            .map(|c| IntPolynomial::constant((c * BigRational::from_integer(lcm.clone())).to_integer()))
            .collect());
    }
    let adj = m.adjugate_polynomials();
    for j in 0..n {
        let col = reduce_vector(&(0..n).map(|i| adj[i][j].clone()).collect::<Vec<_>>(), lambda.poly());
        if col.iter().any(|p| !lambda.is_root_of(p)) {
            return Ok(col);
        }
    }
    Err(Error::precondition(
        "leading eigenvalue is not simple; exact eigenvector unavailable",
    ))
}

/// Reduce each coordinate modulo `modulus` and rescale the whole vector by
/// one positive constant so that it is integral and primitive.
fn reduce_vector(v: &[IntPolynomial], modulus: &IntPolynomial) -> Vec<IntPolynomial> {
    let rat: Vec<RatPolynomial> = v
        .iter()
        .map(|p| {
            let r = p.to_rational();
            if modulus.degree().unwrap_or(0) > 0 {
                r.rem(&modulus.to_rational())
            } else {
                r
            }
        })
        .collect();
    let lcm = rat
        .iter()
        .flat_map(|p| p.coeffs().iter())
        .fold(BigInt::one(), |l, c| num_integer::Integer::lcm(&l, c.denom()));
    let ints: Vec<IntPolynomial> = rat
        .iter()
        .map(|p| p.map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()))
        .collect();
    let g = ints
        .iter()
        .flat_map(|p| p.coeffs().iter())
        .fold(BigInt::zero(), |g, c| num_integer::Integer::gcd(&g, c));
    if g.is_zero() || g.is_one() {
        return ints;
    }
    ints.iter().map(|p| p.map(|c| c / &g)).collect()
}

/// Leading eigenvector of `M` for the eigenvalue `lambda`, oriented into `K`.
fn eigen_direction(
    m: &IntMatrix,
    lambda: &RealAlgebraicNumber,
    cone: &RationalCone,
    eps: &BigRational,
) -> Result<EigenDirection> {
    if cone.ambient_dim() != m.rows() {
        return Err(Error::invalid("cone and matrix dimensions differ"));
    }
    if !cone.is_full_dimensional() {
        return Err(Error::precondition("cone must be full-dimensional"));
    }
    if !lambda.is_root_of(&m.charpoly()) {
        return Err(Error::precondition(
            "spectral radius is not a real eigenvalue; no invariant cone can exist",
        ));
    }
    let cone_invariant = cone.is_invariant_under(m);
    let mut exact = exact_eigenvector(m, lambda, cone)?;
    if !cone.contains_algebraic(&exact, lambda) {
        let neg: Vec<IntPolynomial> = exact.iter().map(|p| -p.clone()).collect();
        if !cone.contains_algebraic(&neg, lambda) {
            return Err(Error::precondition("leading eigenvector does not lie in the cone"));
        }
        exact = neg;
    }
    // normalization index: largest coordinate at a coarse level
    let coarse = lambda.refined(&dyadic(40));
    let k = (0..exact.len())
        .filter(|&i| !lambda.is_root_of(&exact[i]))
        .max_by(|&a, &b| {
            let x = exact[a].eval_interval(coarse.interval()).mid_f64().abs();
            let y = exact[b].eval_interval(coarse.interval()).mid_f64().abs();
            x.partial_cmp(&y).unwrap_or(Ordering::Equal)
        })
        .expect("eigenvector is nonzero");
    let sign = if lambda.sign_of(&exact[k]) == Ordering::Less { -1 } else { 1 };
    let mut bits = 8u32;
    loop {
        let fine = lambda.refined(&(eps * dyadic(bits)));
        let Some(class) = normalized_enclosure(&exact, &fine, k, sign) else {
            bits += 8;
            continue;
        };
        let residual = residual_norm(m, fine.interval(), &class);
        if (residual.hi() <= eps && class.max_width() <= *eps) || bits > MAX_REFINE_BITS {
            return Ok(EigenDirection {
                lambda: lambda.clone(),
                exact,
                norm_index: k,
                norm_sign: sign,
                class,
                residual,
                cone_invariant,
            });
        }
        bits += 8;
    }
}

/// Leading eigenvector of `M` inside `K`, normalized so its largest
/// coordinate is ±1, with `|Mv - λv|_inf <= eps |v|_inf` certified.
pub fn leading_eigenvector_in_cone(m: &PullbackMap, cone: &RationalCone, eps: &BigRational) -> Result<EigenDirection> {
    let rho = spectral_radius(m)?;
    if rho.cmp_rational(&BigRational::one()) != Ordering::Greater {
        return Err(Error::precondition("spectral radius must exceed 1"));
    }
    eigen_direction(&m.matrix, &rho, cone, eps)
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenvectorPair {
    pub lambda_plus: RealAlgebraicNumber,
    pub lambda_minus: RealAlgebraicNumber,
    pub nu_plus: EigenDirection,
    pub nu_minus: EigenDirection,
    /// Both eigenvectors are expressed over the same algebraic number.
    pub shared_lambda: bool,
}

pub fn eigenvector_pair(m: &PullbackMap, cone: &RationalCone, eps: &BigRational) -> Result<EigenvectorPair> {
    if !m.is_automorphism {
        return Err(Error::precondition("eigenvector pairs need an automorphism"));
    }
    let inv = m.inverse()?;
    let lp = spectral_radius(m)?;
    let lm = spectral_radius(&inv)?;
    for l in [&lp, &lm] {
        if l.cmp_rational(&BigRational::one()) != Ordering::Greater {
            return Err(Error::precondition("spectral radius must exceed 1"));
        }
    }
    let shared = lp.cmp_value(&lm) == Ordering::Equal;
    let lm_used = if shared { lp.clone() } else { lm };
    let nu_plus = eigen_direction(&m.matrix, &lp, cone, eps)?;
    let nu_minus = eigen_direction(&inv.matrix, &lm_used, cone, eps)?;
    Ok(EigenvectorPair {
        lambda_plus: lp,
        lambda_minus: lm_used,
        nu_plus,
        nu_minus,
        shared_lambda: shared,
    })
}

impl EigenvectorPair {
    /// Coordinates of a positive multiple of `ν₊ + ν₋` as polynomials in the
    /// shared eigenvalue. `None` unless both directions share `λ`.
    pub fn exact_sum(&self) -> Option<Vec<IntPolynomial>> {
        if !self.shared_lambda {
            return None;
        }
        let p = self.nu_plus.normalizer();
        let q = self.nu_minus.normalizer();
        Some(
            self.nu_plus
                .exact
                .iter()
                .zip(&self.nu_minus.exact)
                .map(|(v, w)| v.clone() * q.clone() + w.clone() * p.clone())
                .collect(),
        )
    }

    /// Exact sign of `T` on polynomial vectors evaluated at the shared `λ`.
    pub fn exact_sign(&self, form: &TopIntersectionForm, args: &[&[IntPolynomial]]) -> Option<Ordering> {
        if !self.shared_lambda {
            return None;
        }
        let val = form_poly(form, args, self.lambda_plus.poly());
        Some(self.lambda_plus.sign_of(&val))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionAReport {
    pub holds: bool,
    pub lambda_plus: RealAlgebraicNumber,
    pub lambda_minus: RealAlgebraicNumber,
    pub radii_equal: bool,
    pub exceeds_one: bool,
}

/// `λ₁(f) > 1` and `λ₁(f) = λ₁(f⁻¹)`, decided exactly.
pub fn condition_a(m: &PullbackMap) -> Result<ConditionAReport> {
    if !m.is_automorphism {
        return Err(Error::precondition("Condition A is stated for automorphisms"));
    }
    let lp = spectral_radius(m)?;
    let lm = spectral_radius(&m.inverse()?)?;
    let radii_equal = lp.cmp_value(&lm) == Ordering::Equal;
    let exceeds_one = lp.cmp_rational(&BigRational::one()) == Ordering::Greater;
    Ok(ConditionAReport {
        holds: radii_equal && exceeds_one,
        lambda_plus: lp,
        lambda_minus: lm,
        radii_equal,
        exceeds_one,
    })
}

/// Polynomial in `t` whose value at the shared `λ` is `T` applied to the
/// listed exact vectors.
pub(crate) fn form_poly(form: &TopIntersectionForm, args: &[&[IntPolynomial]], modulus: &IntPolynomial) -> IntPolynomial {
    let rat: Vec<Vec<RatPolynomial>> = args
        .iter()
        .map(|v| v.iter().map(|p| p.to_rational()).collect())
        .collect();
    let refs: Vec<&[RatPolynomial]> = rat.iter().map(|v| v.as_slice()).collect();
    let value = form.eval_poly(&refs);
    let value = if modulus.degree().unwrap_or(0) > 0 {
        value.rem(&modulus.to_rational())
    } else {
        value
    };
    IntPolynomial::from_rational(&value)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionBReport {
    pub verdict: Verdict,
    /// Enclosure of `T(ν, ..., ν)` with `ν = ν₊ + ν₋`.
    pub volume: RationalInterval,
    pub exact: bool,
}

/// `ν₊ + ν₋` is big, tested through the sign of its top self-intersection.
pub fn condition_b(form: &TopIntersectionForm, pair: &EigenvectorPair, cone: &RationalCone) -> Result<ConditionBReport> {
    if form.rank() != pair.nu_plus.class.dim() {
        return Err(Error::invalid("form rank and class dimension differ"));
    }
    let in_cone = |d: &EigenDirection| cone.contains_algebraic(&d.exact, &d.lambda);
    if !in_cone(&pair.nu_plus) || !in_cone(&pair.nu_minus) {
        return Err(Error::precondition("eigenvectors must lie in the cone"));
    }
    let enclosure = |bits: u32| {
        let a = pair.nu_plus.enclosure_at(bits);
        let b = pair.nu_minus.enclosure_at(bits);
        form.self_power_interval(&a.add(&b).coords)
    };
    if let Some(nu) = pair.exact_sum() {
        // ν₊ + ν₋ up to a positive factor
        let args: Vec<&[IntPolynomial]> = (0..form.dim()).map(|_| nu.as_slice()).collect();
        let sign = pair.exact_sign(form, &args).expect("shared eigenvalue");
        let verdict = if sign == Ordering::Greater { Verdict::True } else { Verdict::False };
        return Ok(ConditionBReport {
            verdict,
            volume: enclosure(64),
            exact: true,
        });
    }
    let mut bits = 32;
    loop {
        let v = enclosure(bits);
        if v.is_positive() {
            return Ok(ConditionBReport { verdict: Verdict::True, volume: v, exact: false });
        }
        if v.hi().is_negative() {
            return Ok(ConditionBReport { verdict: Verdict::False, volume: v, exact: false });
        }
        if bits >= MAX_REFINE_BITS {
            return Ok(ConditionBReport { verdict: Verdict::Unknown, volume: v, exact: false });
        }
        bits += 32;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermStatus {
    /// Certified nonzero, with its sign.
    Positive,
    Negative,
    /// Exactly zero (decided in the number field of the shared eigenvalue).
    Zero,
    /// Enclosure contains zero and has width below the refinement target.
    RefinableToZero,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixedTerm {
    pub j: usize,
    pub status: TermStatus,
    pub enclosure: RationalInterval,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MiddleIndexReport {
    pub ell: Option<usize>,
    pub identity_holds: bool,
    pub identity_exact: bool,
    pub terms: Vec<MixedTerm>,
    pub lambda_plus_pow: RationalInterval,
    pub lambda_minus_pow: RationalInterval,
}

/// Find the unique `0 < ℓ < d` with `ν₊^ℓ · ν₋^(d-ℓ) ≠ 0` and check
/// `λ₊^ℓ = λ₋^(d-ℓ)`.
pub fn middle_index_ell(form: &TopIntersectionForm, pair: &EigenvectorPair, bits: u32) -> Result<MiddleIndexReport> {
    let d = form.dim();
    let a = pair.nu_plus.enclosure_at(bits);
    let b = pair.nu_minus.enclosure_at(bits);
    let target = dyadic(bits / 2);
    let mut terms = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let enclosure = form.mixed_interval(&a.coords, &b.coords, j);
        let args: Vec<&[IntPolynomial]> = (0..d)
            .map(|k| if k < j { pair.nu_plus.exact.as_slice() } else { pair.nu_minus.exact.as_slice() })
            .collect();
        let status = if let Some(sign) = pair.exact_sign(form, &args) {
            match sign {
                Ordering::Greater => TermStatus::Positive,
                Ordering::Less => TermStatus::Negative,
                Ordering::Equal => TermStatus::Zero,
            }
        } else if enclosure.is_positive() {
            TermStatus::Positive
        } else if enclosure.is_negative() {
            TermStatus::Negative
        } else if enclosure.mag() <= target {
            TermStatus::RefinableToZero
        } else {
            return Err(Error::precondition(format!(
                "mixed product j={j} neither certified nonzero nor small at {bits} bits"
            )));
        };
        terms.push(MixedTerm { j, status, enclosure });
    }
    let nonzero: Vec<usize> = terms
        .iter()
        .filter(|t| t.j > 0 && t.j < d)
        .filter(|t| matches!(t.status, TermStatus::Positive | TermStatus::Negative))
        .map(|t| t.j)
        .collect();
    if nonzero.len() > 1 {
        return Err(Error::InvariantViolation(format!(
            "several nonvanishing mixed products at j = {nonzero:?}"
        )));
    }
    let ell = nonzero.first().copied();
    let l = ell.unwrap_or(0) as u32;
    let eps = dyadic(bits);
    let lp_pow = pair.lambda_plus.pow_enclosure(l, &eps);
    let lm_pow = pair.lambda_minus.pow_enclosure(d as u32 - l, &eps);
    let (identity_holds, identity_exact) = match ell {
        None => (false, false),
        Some(l) if pair.shared_lambda => (2 * l == d, true),
        Some(_) => (lp_pow.overlaps(&lm_pow), false),
    };
    Ok(MiddleIndexReport {
        ell,
        identity_holds,
        identity_exact,
        terms,
        lambda_plus_pow: lp_pow,
        lambda_minus_pow: lm_pow,
    })
}

/// `diag(M_g, M_h)` for a product system; mapping degrees multiply.
pub fn block_product(g: &PullbackMap, h: &PullbackMap) -> Result<PullbackMap> {
    PullbackMap::new(
        IntMatrix::block_diag(&g.matrix, &h.matrix),
        g.degree() * h.degree(),
        g.is_automorphism && h.is_automorphism,
    )
}

/// Append one fixed basis class: `diag(M, [1])`.
pub fn hilbert_extension(m: &PullbackMap) -> Result<PullbackMap> {
    if !m.is_automorphism {
        return Err(Error::precondition("extension is defined for automorphisms"));
    }
    PullbackMap::new(
        IntMatrix::block_diag(&m.matrix, &IntMatrix::identity(1)),
        m.degree().clone(),
        true,
    )
}

/// Spectral radius of `U⁻¹ M U` equals that of `M`.
pub fn basis_change_invariance(m: &PullbackMap, u: &IntMatrix) -> Result<bool> {
    let uinv = u
        .inverse_unimodular()
        .ok_or_else(|| Error::precondition("change of basis must be unimodular"))?;
    let conj = &(&uinv * &m.matrix) * u;
    let a = spectral_radius_matrix(&conj)?;
    let b = spectral_radius(m)?;
    Ok(a.cmp_value(&b) == Ordering::Equal)
}

/// Config document for a lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeDoc {
    pub basis_dim: usize,
    #[serde(rename = "dim_X")]
    pub dim_x: usize,
    pub form: Vec<FormEntry>,
    pub pullback: Vec<Vec<BigIntRepr>>,
    #[serde(default = "one_repr")]
    pub degree: BigIntRepr,
    #[serde(default)]
    pub automorphism: Option<bool>,
    pub cone: RationalCone,
}

fn one_repr() -> BigIntRepr {
    BigIntRepr(BigInt::one())
}

impl LatticeDoc {
    pub fn build(&self) -> Result<(TopIntersectionForm, PullbackMap, RationalCone)> {
        let form = TopIntersectionForm::from_entries(self.basis_dim, self.dim_x, &self.form)?;
        let matrix = IntMatrix::from_rows(
            self.pullback
                .iter()
                .map(|r| r.iter().map(|x| x.0.clone()).collect())
                .collect(),
        )?;
        if matrix.rows() != self.basis_dim {
            return Err(Error::invalid("pullback size does not match basis_dim"));
        }
        let auto = self.automorphism.unwrap_or(self.degree.0.is_one() && matrix.is_unimodular());
        let map = PullbackMap::new(matrix, self.degree.0.clone(), auto)?;
        if self.cone.ambient_dim() != self.basis_dim {
            return Err(Error::invalid("cone dimension does not match basis_dim"));
        }
        Ok((form, map, self.cone.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rint, ten_pow_neg};

    fn pm(rows: &[Vec<i64>]) -> PullbackMap {
        PullbackMap::from_i64(rows, 1, true).unwrap()
    }

    fn wehler() -> PullbackMap {
        pm(&[vec![-1, -2, -6], vec![2, 3, 10], vec![2, 6, 15]])
    }

    fn wehler_gram() -> TopIntersectionForm {
        TopIntersectionForm::from_gram(
            &IntMatrix::from_i64(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]]).to_rational(),
        )
        .unwrap()
    }

    fn wehler_cone() -> RationalCone {
        RationalCone::from_i64(&[vec![-1, 1, 1], vec![1, -1, 1], vec![1, 1, -1]]).unwrap()
    }

    #[test]
    fn radii() {
        let id = pm(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(spectral_radius(&id).unwrap().as_rational(), Some(&rint(1)));
        let r = spectral_radius(&pm(&[vec![3, 4], vec![2, 3]])).unwrap();
        assert_eq!(r.poly(), &IntPolynomial::from_i64(&[1, -6, 1]));
        let w = spectral_radius(&wehler()).unwrap();
        assert_eq!(w.poly(), &IntPolynomial::from_i64(&[1, -18, 1]));
    }

    #[test]
    fn radius_of_rotation_and_negative_eigenvalue() {
        // rotation by 90 degrees: radius 1, no real eigenvalue
        let rot = pm(&[vec![0, -1], vec![1, 0]]);
        assert_eq!(spectral_radius(&rot).unwrap().as_rational(), Some(&rint(1)));
        let neg = PullbackMap::from_i64(&[vec![-3]], 3, false).unwrap();
        assert_eq!(spectral_radius(&neg).unwrap().as_rational(), Some(&rint(3)));
        // complex pair of modulus sqrt 5 dominates the real eigenvalue 2
        let m = PullbackMap::from_i64(&[vec![1, -2, 0], vec![2, 1, 0], vec![0, 0, 2]], 1, false).unwrap();
        let r = spectral_radius(&m).unwrap();
        assert!((r.to_f64() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cone_membership() {
        let k = wehler_cone();
        assert!(k.contains(&[rint(0), rint(0), rint(1)]));
        assert!(!k.contains(&[rint(-1), rint(-1), rint(1)]));
        assert!(k.is_full_dimensional());
        assert!(RationalCone::from_i64(&[vec![1, 0], vec![-1, 0]]).is_err());
    }

    #[test]
    fn rank_two_pair() {
        let m = pm(&[vec![3, 4], vec![2, 3]]);
        let k = RationalCone::from_i64(&[vec![4, 3], vec![4, -3]]).unwrap();
        let pair = eigenvector_pair(&m, &k, &ten_pow_neg(8)).unwrap();
        assert!(pair.shared_lambda);
        let v = pair.nu_plus.to_f64();
        assert!((v[0] / v[1] - 2f64.sqrt()).abs() < 1e-7);
        let w = pair.nu_minus.to_f64();
        assert!((w[0] / w[1] + 2f64.sqrt()).abs() < 1e-7);
        let q = TopIntersectionForm::from_gram(&IntMatrix::from_i64(&[vec![1, 0], vec![0, -2]]).to_rational()).unwrap();
        assert!(m.preserves_form(&q));
        assert_eq!(condition_b(&q, &pair, &k).unwrap().verdict, Verdict::True);
        let mid = middle_index_ell(&q, &pair, 64).unwrap();
        assert_eq!(mid.ell, Some(1));
        assert!(mid.identity_holds);
    }

    #[test]
    fn wehler_conditions() {
        let m = wehler();
        assert!(m.preserves_form(&wehler_gram()));
        let a = condition_a(&m).unwrap();
        assert!(a.holds);
        let pair = eigenvector_pair(&m, &wehler_cone(), &ten_pow_neg(8)).unwrap();
        let b = condition_b(&wehler_gram(), &pair, &wehler_cone()).unwrap();
        assert_eq!(b.verdict, Verdict::True);
        assert!(b.volume.is_positive());
        let mid = middle_index_ell(&wehler_gram(), &pair, 64).unwrap();
        assert_eq!(mid.ell, Some(1));
        assert_eq!(mid.terms[0].status, TermStatus::Zero);
        assert_eq!(mid.terms[2].status, TermStatus::Zero);
    }

    #[test]
    fn scalar_matrix_accepts_generator() {
        let m = PullbackMap::from_i64(&[vec![2, 0], vec![0, 2]], 4, false).unwrap();
        let v = leading_eigenvector_in_cone(&m, &RationalCone::positive_orthant(2), &ten_pow_neg(8)).unwrap();
        assert_eq!(v.class, DivisorClass::from_i64(&[1, 0]));
    }

    #[test]
    fn identity_has_no_pair() {
        let id = pm(&[vec![1, 0], vec![0, 1]]);
        let err = eigenvector_pair(&id, &RationalCone::positive_orthant(2), &ten_pow_neg(8)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        assert!(!condition_a(&id).unwrap().holds);
    }

    #[test]
    fn products_and_extensions() {
        let g = PullbackMap::from_i64(&[vec![2]], 2, false).unwrap();
        let h = pm(&[vec![2, 1], vec![1, 1]]);
        let b = block_product(&g, &h).unwrap();
        let r = spectral_radius(&b).unwrap();
        assert_eq!(r.cmp_value(&spectral_radius(&h).unwrap()), Ordering::Equal);
        let e = hilbert_extension(&wehler()).unwrap();
        assert_eq!(e.rank(), 4);
        assert_eq!(
            spectral_radius(&e).unwrap().cmp_value(&spectral_radius(&wehler()).unwrap()),
            Ordering::Equal
        );
        let u = IntMatrix::from_i64(&[vec![1, 1], vec![0, 1]]);
        assert!(basis_change_invariance(&h, &u).unwrap());
        assert!(basis_change_invariance(&h, &IntMatrix::from_i64(&[vec![2, 0], vec![0, 1]])).is_err());
    }
}
