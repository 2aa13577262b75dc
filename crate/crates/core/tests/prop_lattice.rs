use std::cmp::Ordering;

use arithdyn::bbform::{induced_top_form, isometry_check, signature, BeauvilleBogomolovForm};
use arithdyn::nslattice::*;
use arithdyn::scalar::{rat, rint};
use arithdyn::{IntMatrix, IntPolynomial, RatMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

fn int_matrix(n: usize, r: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-r..=r, n * n).prop_map(move |v| {
        IntMatrix::from_i64(&v.chunks(n).map(|c| c.to_vec()).collect::<Vec<_>>())
    })
}

fn square_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4).prop_flat_map(|n| int_matrix(n, 3))
}

/// Product of elementary row operations and sign flips.
fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n, 0..n, -2i64..=2, any::<bool>()), 1..=8).prop_map(move |ops| {
        let mut m = IntMatrix::identity(n);
        for (i, j, c, flip) in ops {
            let mut e = IntMatrix::identity(n);
            if i != j {
                e[(i, j)] = BigInt::from(c);
            } else if flip {
                e[(i, i)] = BigInt::from(-1);
            }
            m = &m * &e;
        }
        m
    })
}

fn sized_unimodular() -> impl Strategy<Value = IntMatrix> {
    (2usize..=4).prop_flat_map(unimodular)
}

/// `ρ(A) ≤ ‖A^k‖^{1/k}` for every norm, with equality in the limit.
fn gelfand_estimate(m: &IntMatrix, k: u32) -> f64 {
    let p = m.pow(k);
    let norm = (0..p.rows())
        .map(|i| p.row(i).iter().map(|x| x.abs().to_f64().unwrap()).sum::<f64>())
        .fold(0.0, f64::max);
    norm.powf(1.0 / k as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn charpoly_matches_determinant(m in square_matrix(), t in -5i64..=5) {
        let n = m.rows();
        let tid = RatMatrix::scalar(n, rint(t));
        let det = (tid - m.to_rational()).det();
        prop_assert_eq!(m.charpoly().eval_rational(&rint(t)), det);
        prop_assert_eq!(BigRational::from_integer(m.det_int()), m.to_rational().det());
    }

    #[test]
    fn spectral_radius_bounds(m in square_matrix()) {
        let rho = spectral_radius_matrix(&m).unwrap();
        // ρ is |z| for an eigenvalue z, so ρ² is a root of the symmetric-square charpoly
        let rho_sq = rho.pow_enclosure(2, &arithdyn::scalar::ten_pow_neg(30));
        let sym = m.sym_square().charpoly();
        prop_assert!(m.rows() == 1 || sym.eval_interval(&rho_sq).contains_zero());
        let r = rho.to_f64();
        for k in [1u32, 4, 16] {
            prop_assert!(r <= gelfand_estimate(&m, k) * (1.0 + 1e-9) + 1e-12);
        }
        let upper = gelfand_estimate(&m, 96);
        prop_assert!(upper <= 1.35 * r + 1e-12, "ρ = {r}, ‖A^96‖^(1/96) = {upper}");
    }

    #[test]
    fn conjugation_preserves_radius(m in (2usize..=4).prop_flat_map(|n| (int_matrix(n, 3), unimodular(n)))) {
        let (a, u) = m;
        prop_assert!(u.is_unimodular());
        let pm = PullbackMap::morphism(a, BigInt::from(1)).unwrap();
        prop_assert!(basis_change_invariance(&pm, &u).unwrap());
    }

    #[test]
    fn hilbert_extension_keeps_lambda1(u in sized_unimodular()) {
        let m = PullbackMap::automorphism(u).unwrap();
        let h = hilbert_extension(&m).unwrap();
        prop_assert_eq!(spectral_radius(&h).unwrap().cmp_value(&spectral_radius(&m).unwrap()), Ordering::Equal);
        prop_assert_eq!(h.rank(), m.rank() + 1);
    }

    #[test]
    fn block_product_takes_max(a in (1usize..=2).prop_flat_map(|n| int_matrix(n, 4)), b in (1usize..=3).prop_flat_map(|n| int_matrix(n, 3))) {
        let ga = PullbackMap::morphism(a, BigInt::from(2)).unwrap();
        let gb = PullbackMap::morphism(b, BigInt::from(3)).unwrap();
        let p = block_product(&ga, &gb).unwrap();
        let ra = spectral_radius(&ga).unwrap();
        let rb = spectral_radius(&gb).unwrap();
        prop_assert_eq!(spectral_radius(&p).unwrap().cmp_value(&ra.max(rb)), Ordering::Equal);
        prop_assert_eq!(p.degree(), &BigInt::from(6));
    }

    #[test]
    fn inverse_composes_to_identity(u in sized_unimodular()) {
        let m = PullbackMap::automorphism(u).unwrap();
        let id = m.compose_after(&m.inverse().unwrap()).unwrap();
        prop_assert_eq!(id.matrix, IntMatrix::identity(m.rank()));
    }

    #[test]
    fn cone_contains_nonnegative_combinations(
        gens in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 3..=5),
        coeffs in prop::collection::vec(0i64..=4, 5),
    ) {
        let Ok(cone) = RationalCone::from_i64(&gens) else { return Ok(()); };
        let v: Vec<BigRational> = (0..3)
            .map(|i| gens.iter().zip(&coeffs).map(|(g, c)| rint(g[i] * c)).sum())
            .collect();
        prop_assert!(cone.contains(&v));
        prop_assert!(RationalCone::positive_orthant(3).is_invariant_under(&IntMatrix::identity(3)));
    }

    #[test]
    fn fujiki_relation_holds(
        diag in prop::collection::vec(-3i64..=3, 2..=3),
        off in -2i64..=2,
        c in 1i64..=5,
        m in 1usize..=2,
        v in prop::collection::vec(-4i64..=4, 3),
    ) {
        let n = diag.len();
        let mut gram: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| if i == j { diag[i] } else { 0 }).collect()).collect();
        gram[0][1] = off;
        gram[1][0] = off;
        let Ok(bb) = BeauvilleBogomolovForm::from_i64(&gram, c, m) else { return Ok(()); };
        let v: Vec<BigRational> = v[..n].iter().map(|&x| rint(x)).collect();
        let q = bb.q(&v, &v);
        let top = induced_top_form(&bb);
        prop_assert_eq!(top.self_power(&v), rint(c) * num_traits::pow(q, m));
        prop_assert!(isometry_check(&PullbackMap::automorphism(IntMatrix::identity(n)).unwrap(), &bb));
    }

    #[test]
    fn signature_counts_diagonal_signs((diag, u) in (1usize..=5).prop_flat_map(|n| (prop::collection::vec(-5i64..=5, n), unimodular(n)))) {
        let n = diag.len();
        let d: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| if i == j { rint(diag[i]) } else { rat(0, 1) }).collect()).collect();
        let d = RatMatrix::from_rows(d).unwrap();
        let ur = u.to_rational();
        // congruent forms share their signature
        let g = &(&ur.transpose() * &d) * &ur;
        let s = signature(&g).unwrap();
        prop_assert_eq!(s.pos, diag.iter().filter(|x| x.is_positive()).count());
        prop_assert_eq!(s.neg, diag.iter().filter(|x| x.is_negative()).count());
        prop_assert_eq!(s.zero, diag.iter().filter(|x| x.is_zero()).count());
    }
}

#[test]
fn salem_factor_of_wehler_composite() {
    let [a, b, c] = arithdyn::dynsys::wehler_involution_matrices();
    let m = &(&a * &b) * &c;
    let want = IntPolynomial::from_i64(&[1, -18, 1]);
    let rho = spectral_radius_matrix(&m).unwrap();
    assert!(rho.is_root_of(&want));
    assert!((rho.to_f64() - (9.0 + 4.0 * 5f64.sqrt())).abs() < 1e-12);
}
