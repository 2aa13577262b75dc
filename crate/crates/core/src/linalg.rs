//! Dense matrices over a generic scalar ring.
//!
//! Integer matrices get exact characteristic polynomials (Faddeev–LeVerrier),
//! adjugates and unimodular inverses; field matrices get elimination-based
//! determinant, inverse, rank and nullspace; float matrices get a power
//! iteration for numerical cross-checks.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactreal::poly::IntPolynomial;
use crate::scalar::{Field, Scalar};
use crate::serde_util::BigIntRepr;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<BigRational>;

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn scalar(n: usize, c: S) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|a| a.clone() * c.clone())
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn pow(&self, k: u32) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `diag(a, b)`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let mut m = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m[(i, j)] = a[(i, j)].clone();
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                m[(a.rows + i, a.cols + j)] = b[(i, j)].clone();
            }
        }
        m
    }

    /// Action on the symmetric square, in the basis `e_i e_j` (`i <= j`)
    /// ordered lexicographically.
    pub fn sym_square(&self) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let mut m = Self::zeros(pairs.len(), pairs.len());
        for (c, &(i, j)) in pairs.iter().enumerate() {
            for (r, &(k, l)) in pairs.iter().enumerate() {
                let mut v = self[(k, i)].clone() * self[(l, j)].clone();
                if k != l {
                    v = v + self[(l, i)].clone() * self[(k, j)].clone();
                }
                m[(r, c)] = v;
            }
        }
        m
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, S: Scalar> Mul<&'a Matrix<S>> for &'a Matrix<S> {
    type Output = Matrix<S>;

    fn mul(self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut m: Matrix<S> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = m[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                    m[(i, j)] = v;
                }
            }
        }
        m
    }
}

impl<S: Scalar> Mul for Matrix<S> {
    type Output = Matrix<S>;

    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<S: Scalar> Add for Matrix<S> {
    type Output = Matrix<S>;

    fn add(self, rhs: Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.into_iter().zip(rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<S: Scalar> Sub for Matrix<S> {
    type Output = Matrix<S>;

    fn sub(self, rhs: Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.into_iter().zip(rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<S: Scalar> Neg for Matrix<S> {
    type Output = Matrix<S>;

    fn neg(self) -> Self {
        self.map(|a| -a.clone())
    }
}

impl<S: Field> Matrix<S> {
    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let best = (r..m.rows)
                .filter(|&i| !m[(i, c)].is_zero())
                .max_by(|&a, &b| {
                    m[(a, c)]
                        .magnitude()
                        .partial_cmp(&m[(b, c)].magnitude())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
            let Some(p) = best else { continue };
            for j in 0..m.cols {
                m.data.swap(r * m.cols + j, p * m.cols + j);
            }
            let inv = S::one() / m[(r, c)].clone();
            for j in 0..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in 0..m.cols {
                        m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> S {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = S::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return S::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone() / piv.clone();
                for j in c..n {
                    m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = S::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Basis of the right nullspace.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Solve `self x = b` for square nonsingular `self`.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        let inv = self.inverse()?;
        Some(inv.mul_vec(b))
    }
}

impl<F: Field + Float> Matrix<F> {
    /// Normalized power iteration from `start`. Returns the Rayleigh-type
    /// growth estimate `|Mv|_inf / |v|_inf` and the final unit vector.
    pub fn power_iteration(&self, start: &[F], iters: usize) -> (F, Vec<F>) {
        let norm = |v: &[F]| v.iter().fold(F::zero(), |m, x| m.max(x.abs()));
        let mut v: Vec<F> = start.to_vec();
        let n0 = norm(&v);
        v.iter_mut().for_each(|x| *x = *x / n0);
        let mut growth = F::zero();
        for _ in 0..iters {
            let w = self.mul_vec(&v);
            growth = norm(&w);
            if growth == F::zero() {
                break;
            }
            v = w.into_iter().map(|x| x / growth).collect();
        }
        (growth, v)
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|a| BigRational::from_integer(a.clone()))
    }

    /// Faddeev–LeVerrier: returns the characteristic polynomial
    /// `det(tI - A)` and the matrices `B_1..B_n` with
    /// `adj(tI - A) = sum_k B_k t^(n-k)`.
    pub fn faddeev_leverrier(&self) -> (IntPolynomial, Vec<IntMatrix>) {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut bs = Vec::with_capacity(n);
        let mut prev = IntMatrix::zeros(n, n);
        for k in 1..=n {
            let b = &(self * &prev) + &IntMatrix::scalar(n, coeffs[n - k + 1].clone());
            let tr = (self * &b).trace();
            coeffs[n - k] = -(tr / BigInt::from(k as u64));
            prev = b.clone();
            bs.push(b);
        }
        (IntPolynomial::new(coeffs), bs)
    }

    pub fn charpoly(&self) -> IntPolynomial {
        self.faddeev_leverrier().0
    }

    pub fn det_int(&self) -> BigInt {
        let c0 = self.charpoly().coeff(0);
        if self.rows % 2 == 0 {
            c0
        } else {
            -c0
        }
    }

    /// Entries of `adj(tI - A)` as integer polynomials in `t`.
    pub fn adjugate_polynomials(&self) -> Vec<Vec<IntPolynomial>> {
        let n = self.rows;
        let (_, bs) = self.faddeev_leverrier();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut c = vec![BigInt::zero(); n];
                        for (k, b) in bs.iter().enumerate() {
                            c[n - 1 - k] = b[(i, j)].clone();
                        }
                        IntPolynomial::new(c)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det_int().abs().is_one()
    }

    /// Inverse over the integers, if the matrix is unimodular.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        if !self.is_unimodular() {
            return None;
        }
        let inv = self.to_rational().inverse()?;
        Some(inv.map(|x| x.to_integer()))
    }
}

impl<'a> Add<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;

    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        self.clone() + rhs.clone()
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let rows: Vec<Vec<BigIntRepr>> = self
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigIntRepr).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<BigIntRepr>> = Vec::deserialize(d)?;
        IntMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| x.0).collect())
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    #[test]
    fn charpoly_of_composite() {
        let a = m(&[vec![-1, -2, -6], vec![2, 3, 10], vec![2, 6, 15]]);
        assert_eq!(a.charpoly(), IntPolynomial::from_i64(&[1, -17, -17, 1]));
        assert_eq!(a.det_int(), BigInt::from(-1));
    }

    #[test]
    fn adjugate_identity() {
        // (tI - A) adj(tI - A) = charpoly(t) I at a sample t
        let a = m(&[vec![3, 4, 0], vec![2, 3, 1], vec![0, -1, 2]]);
        let adj = a.adjugate_polynomials();
        let t = BigInt::from(7);
        let p = a.charpoly().eval(&t);
        let tia = IntMatrix::scalar(3, t.clone()) - a.clone();
        let adj_t = IntMatrix::from_rows(
            adj.iter().map(|r| r.iter().map(|q| q.eval(&t)).collect()).collect(),
        )
        .unwrap();
        assert_eq!(&tia * &adj_t, IntMatrix::scalar(3, p));
    }

    #[test]
    fn inverse_and_nullspace() {
        let a = m(&[vec![3, 4], vec![2, 3]]);
        assert_eq!(a.inverse_unimodular().unwrap(), m(&[vec![3, -4], vec![-2, 3]]));
        let s = m(&[vec![1, 2], vec![2, 4]]).to_rational();
        let ns = s.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(s.mul_vec(&ns[0]).iter().all(|x| x.is_zero()));
        assert_eq!(m(&[vec![2, 0], vec![0, 3]]).to_rational().det(), BigRational::from_integer(6.into()));
    }

    #[test]
    fn sym_square_eigenvalues() {
        // eigenvalues of Sym^2 are products of pairs: for diag(2,3) -> 4, 6, 9
        let a = m(&[vec![2, 0], vec![0, 3]]);
        let p = a.sym_square().charpoly();
        for r in [4, 6, 9] {
            assert!(p.eval(&BigInt::from(r)).is_zero());
        }
    }

    #[test]
    fn generic_over_floats() {
        let a = Matrix::<f64>::from_rows(vec![vec![3.0, 4.0], vec![2.0, 3.0]]).unwrap();
        let (g, v) = a.power_iteration(&[1.0, 1.0], 60);
        assert!((g - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-9);
        assert!((v[0] / v[1] - 2f64.sqrt()).abs() < 1e-9);
        let b = Matrix::<f32>::identity(3);
        assert_eq!(b.det(), 1.0f32);
    }
}
