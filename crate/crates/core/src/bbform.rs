//! Beauville–Bogomolov quadratic forms, the Fujiki relation and the induced
//! top intersection form.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactreal::{IntPolynomial, RationalInterval};
use crate::linalg::{IntMatrix, RatMatrix};
use crate::nslattice::{
    middle_index_ell, EigenvectorPair, MiddleIndexReport, PullbackMap, RationalCone, TermStatus, TopIntersectionForm,
    Verdict,
};
use crate::serde_util::RationalRepr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

/// Inertia of a symmetric rational matrix by congruence diagonalization.
pub fn signature(gram: &RatMatrix) -> Result<Signature> {
    if !gram.is_square() || gram.transpose() != *gram {
        return Err(Error::invalid("Gram matrix must be square and symmetric"));
    }
    let n = gram.rows();
    let mut a = gram.clone();
    let mut diag = Vec::with_capacity(n);
    let swap = |a: &mut RatMatrix, i: usize, j: usize| {
        for k in 0..n {
            let t = a[(i, k)].clone();
            a[(i, k)] = a[(j, k)].clone();
            a[(j, k)] = t;
        }
        for k in 0..n {
            let t = a[(k, i)].clone();
            a[(k, i)] = a[(k, j)].clone();
            a[(k, j)] = t;
        }
    };
    for k in 0..n {
        if a[(k, k)].is_zero() {
            if let Some(p) = (k + 1..n).find(|&i| !a[(i, i)].is_zero()) {
                swap(&mut a, k, p);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[(k, j)].is_zero()) {
                // e_k <- e_k + e_j makes the diagonal entry 2 a_kj
                for c in 0..n {
                    let v = a[(k, c)].clone() + a[(j, c)].clone();
                    a[(k, c)] = v;
                }
                for r in 0..n {
                    let v = a[(r, k)].clone() + a[(r, j)].clone();
                    a[(r, k)] = v;
                }
            } else {
                diag.push(BigRational::zero());
                continue;
            }
        }
        let piv = a[(k, k)].clone();
        for i in k + 1..n {
            if a[(i, k)].is_zero() {
                continue;
            }
            let f = a[(i, k)].clone() / piv.clone();
            for c in 0..n {
                let v = a[(i, c)].clone() - f.clone() * a[(k, c)].clone();
                a[(i, c)] = v;
            }
            for r in 0..n {
                let v = a[(r, i)].clone() - f.clone() * a[(r, k)].clone();
                a[(r, i)] = v;
            }
        }
        diag.push(piv);
    }
    Ok(Signature {
        pos: diag.iter().filter(|d| d.is_positive()).count(),
        neg: diag.iter().filter(|d| d.is_negative()).count(),
        zero: diag.iter().filter(|d| d.is_zero()).count(),
    })
}

/// A quadratic form `q` with Fujiki constant `c` on a variety of dimension `2m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeauvilleBogomolovForm {
    gram: RatMatrix,
    fujiki_c: BigRational,
    half_dim: usize,
}

impl BeauvilleBogomolovForm {
    pub fn new(gram: RatMatrix, fujiki_c: BigRational, half_dim: usize) -> Result<Self> {
        if !gram.is_square() || gram.transpose() != gram {
            return Err(Error::invalid("Gram matrix must be square and symmetric"));
        }
        if !fujiki_c.is_positive() {
            return Err(Error::invalid("Fujiki constant must be positive"));
        }
        if half_dim == 0 {
            return Err(Error::invalid("half dimension must be at least 1"));
        }
        Ok(BeauvilleBogomolovForm {
            gram,
            fujiki_c,
            half_dim,
        })
    }

    pub fn from_i64(gram: &[Vec<i64>], c: i64, m: usize) -> Result<Self> {
        Self::new(
            IntMatrix::from_i64(gram).to_rational(),
            BigRational::from_integer(BigInt::from(c)),
            m,
        )
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn fujiki_c(&self) -> &BigRational {
        &self.fujiki_c
    }

    pub fn half_dim(&self) -> usize {
        self.half_dim
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    /// Signature `(1, ρ - 1)`.
    pub fn is_hyperbolic(&self) -> bool {
        signature(&self.gram).map_or(false, |s| s.pos == 1 && s.neg + 1 == self.rank() && s.zero == 0)
    }

    pub fn q(&self, v: &[BigRational], w: &[BigRational]) -> BigRational {
        let gw = self.gram.mul_vec(w);
        v.iter().zip(gw).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn bilinear_form(&self) -> TopIntersectionForm {
        TopIntersectionForm::from_gram(&self.gram).expect("validated symmetric")
    }
}

fn double_factorial_odd(m: usize) -> BigInt {
    // (2m - 1)!!
    (1..=m).fold(BigInt::one(), |acc, k| acc * BigInt::from(2 * k - 1))
}

/// Sum over perfect matchings of positions `0..2m` of the product of Gram
/// entries at the matched indices.
fn matching_sum(gram: &RatMatrix, idx: &[usize]) -> BigRational {
    fn rec(gram: &RatMatrix, idx: &[usize], free: &mut Vec<usize>) -> BigRational {
        if free.is_empty() {
            return BigRational::one();
        }
        let a = free.remove(0);
        let mut total = BigRational::zero();
        for k in 0..free.len() {
            let b = free.remove(k);
            let q = &gram[(idx[a], idx[b])];
            if !q.is_zero() {
                total += q * rec(gram, idx, free);
            }
            free.insert(k, b);
        }
        free.insert(0, a);
        total
    }
    let mut free: Vec<usize> = (0..idx.len()).collect();
    rec(gram, idx, &mut free)
}

/// The symmetric `2m`-linear form with `T(v, ..., v) = c q(v)^m`:
/// `T(v_1, ..., v_2m) = c / (2m-1)!! · Σ_matchings Π q(v_i, v_j)`.
pub fn induced_top_form(bb: &BeauvilleBogomolovForm) -> TopIntersectionForm {
    let m = bb.half_dim;
    let mut t = TopIntersectionForm::new(bb.rank(), 2 * m).expect("positive degree");
    let scale = &bb.fujiki_c / BigRational::from_integer(double_factorial_odd(m));
    for ms in t.multisets() {
        let v = matching_sum(&bb.gram, &ms);
        if !v.is_zero() {
            t.set(&ms, &scale * v);
        }
    }
    t
}

/// Exact identity `Mᵀ G M = G`.
pub fn isometry_check(m: &PullbackMap, bb: &BeauvilleBogomolovForm) -> bool {
    if m.rank() != bb.rank() {
        return false;
    }
    let mr = m.matrix.to_rational();
    &(&mr.transpose() * &bb.gram) * &mr == bb.gram
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadraticValue {
    pub status: TermStatus,
    pub enclosure: RationalInterval,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsotropyReport {
    pub q_nu_plus: QuadraticValue,
    pub q_nu_minus: QuadraticValue,
    /// `q(ν₊ + ν₋)` with the sup-norm normalized eigenvectors.
    pub q_sum: QuadraticValue,
    pub big: Verdict,
    pub middle: Option<MiddleIndexReport>,
}

fn classify(exact: Option<Ordering>, enclosure: &RationalInterval, target: &BigRational) -> TermStatus {
    match exact {
        Some(Ordering::Greater) => TermStatus::Positive,
        Some(Ordering::Less) => TermStatus::Negative,
        Some(Ordering::Equal) => TermStatus::Zero,
        None if enclosure.is_positive() => TermStatus::Positive,
        None if enclosure.is_negative() => TermStatus::Negative,
        None if enclosure.mag() <= *target => TermStatus::RefinableToZero,
        None => TermStatus::RefinableToZero,
    }
}

/// Isotropy of the leading eigenvectors, positivity of `q(ν₊ + ν₋)` and the
/// middle index on the induced top form.
pub fn isotropy_and_bigness_report(
    bb: &BeauvilleBogomolovForm,
    pair: &EigenvectorPair,
    bits: u32,
) -> Result<IsotropyReport> {
    if bb.rank() != pair.nu_plus.class.dim() {
        return Err(Error::invalid("form rank and class dimension differ"));
    }
    let q = bb.bilinear_form();
    let target = BigRational::new(BigInt::one(), BigInt::one() << (bits / 2) as usize);
    let a = pair.nu_plus.enclosure_at(bits);
    let b = pair.nu_minus.enclosure_at(bits);
    let sum = a.add(&b);
    let enc_plus = q.self_power_interval(&a.coords);
    let enc_minus = q.self_power_interval(&b.coords);
    let enc_sum = q.self_power_interval(&sum.coords);
    let vp: &[IntPolynomial] = pair.nu_plus.exact_coords();
    let vm: &[IntPolynomial] = pair.nu_minus.exact_coords();
    let exact_plus = pair.exact_sign(&q, &[vp, vp]);
    let exact_minus = pair.exact_sign(&q, &[vm, vm]);
    let exact_sum = pair.exact_sum().and_then(|s| pair.exact_sign(&q, &[&s, &s]));
    let q_nu_plus = QuadraticValue {
        status: classify(exact_plus, &enc_plus, &target),
        enclosure: enc_plus,
    };
    let q_nu_minus = QuadraticValue {
        status: classify(exact_minus, &enc_minus, &target),
        enclosure: enc_minus,
    };
    let sum_status = classify(exact_sum, &enc_sum, &target);
    let big = match sum_status {
        TermStatus::Positive => Verdict::True,
        TermStatus::Negative | TermStatus::Zero => Verdict::False,
        TermStatus::RefinableToZero if exact_sum.is_none() => Verdict::Unknown,
        TermStatus::RefinableToZero => Verdict::False,
    };
    let middle = if big == Verdict::True {
        Some(middle_index_ell(&induced_top_form(bb), pair, bits)?)
    } else {
        None
    };
    Ok(IsotropyReport {
        q_nu_plus,
        q_nu_minus,
        q_sum: QuadraticValue {
            status: sum_status,
            enclosure: enc_sum,
        },
        big,
        middle,
    })
}

/// Config document: `{gram, fujiki_c, m}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BBDoc {
    pub gram: Vec<Vec<RationalRepr>>,
    pub fujiki_c: RationalRepr,
    pub m: usize,
    /// Optional automorphism action to test against the form.
    #[serde(default)]
    pub isometry: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub cone: Option<RationalCone>,
}

impl BBDoc {
    pub fn build(&self) -> Result<BeauvilleBogomolovForm> {
        let g = RatMatrix::from_rows(
            self.gram
                .iter()
                .map(|r| r.iter().map(|x| x.0.clone()).collect())
                .collect(),
        )?;
        BeauvilleBogomolovForm::new(g, self.fujiki_c.0.clone(), self.m)
    }

    pub fn isometry_map(&self) -> Result<Option<PullbackMap>> {
        match &self.isometry {
            Some(rows) => {
                if rows.len() != self.gram.len() || rows.iter().any(|r| r.len() != rows.len()) {
                    return Err(Error::invalid("isometry size does not match the form"));
                }
                let m = IntMatrix::from_i64(rows);
                let auto = m.is_unimodular();
                Ok(Some(PullbackMap::new(m, BigInt::one(), auto)?))
            }
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nslattice::eigenvector_pair;
    use crate::scalar::{rint, ten_pow_neg};

    #[test]
    fn signatures() {
        let s = |g: &[Vec<i64>]| signature(&IntMatrix::from_i64(g).to_rational()).unwrap();
        assert_eq!(s(&[vec![2]]), Signature { pos: 1, neg: 0, zero: 0 });
        assert_eq!(s(&[vec![0, 1], vec![1, 0]]), Signature { pos: 1, neg: 1, zero: 0 });
        assert_eq!(
            s(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]]),
            Signature { pos: 1, neg: 2, zero: 0 }
        );
        assert_eq!(s(&[vec![1, 1], vec![1, 1]]), Signature { pos: 1, neg: 0, zero: 1 });
        assert!(signature(&IntMatrix::from_i64(&[vec![0, 1], vec![2, 0]]).to_rational()).is_err());
    }

    #[test]
    fn fujiki_diagonal() {
        let bb = BeauvilleBogomolovForm::from_i64(&[vec![1, 0], vec![0, -2]], 3, 2).unwrap();
        let t = induced_top_form(&bb);
        let v = vec![rint(2), rint(1)];
        let qv = bb.q(&v, &v);
        assert_eq!(t.self_power(&v), rint(3) * &qv * &qv);
        let m1 = induced_top_form(&BeauvilleBogomolovForm::from_i64(&[vec![1, 0], vec![0, -2]], 5, 1).unwrap());
        assert_eq!(m1.value(&[1, 1]), rint(-10));
    }

    #[test]
    fn isometries() {
        let bb = BeauvilleBogomolovForm::from_i64(&[vec![1, 0], vec![0, -2]], 1, 1).unwrap();
        assert!(isometry_check(&PullbackMap::from_i64(&[vec![3, 4], vec![2, 3]], 1, true).unwrap(), &bb));
        assert!(!isometry_check(&PullbackMap::from_i64(&[vec![2, 0], vec![0, 2]], 4, false).unwrap(), &bb));
    }

    #[test]
    fn rank_two_report_for_both_dimensions() {
        let m = PullbackMap::from_i64(&[vec![3, 4], vec![2, 3]], 1, true).unwrap();
        let k = RationalCone::from_i64(&[vec![4, 3], vec![4, -3]]).unwrap();
        let pair = eigenvector_pair(&m, &k, &ten_pow_neg(8)).unwrap();
        for half in [1usize, 2] {
            let bb = BeauvilleBogomolovForm::from_i64(&[vec![1, 0], vec![0, -2]], 1, half).unwrap();
            let r = isotropy_and_bigness_report(&bb, &pair, 64).unwrap();
            assert_eq!(r.q_nu_plus.status, TermStatus::Zero);
            assert_eq!(r.q_nu_minus.status, TermStatus::Zero);
            assert_eq!(r.big, Verdict::True);
            let mid = r.middle.unwrap();
            assert_eq!(mid.ell, Some(half));
            assert!(mid.identity_holds);
        }
    }
}
