use std::cmp::Ordering;

use arithdyn::exactreal::log::{exp_interval, ln_int, ln_rational};
use arithdyn::exactreal::*;
use arithdyn::scalar::{rat, rint, ten_pow_neg};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=7).prop_map(|(a, b)| rat(a, b))
}

fn interval_with_point() -> impl Strategy<Value = (RationalInterval, BigRational)> {
    (small_rat(), 0i64..=20, 1i64..=5, 0u32..=100).prop_map(|(lo, w, d, t)| {
        let hi = lo.clone() + rat(w, d);
        let x = lo.clone() + (hi.clone() - lo.clone()) * rat(t as i64, 100);
        (RationalInterval::new(lo, hi), x)
    })
}

/// `∏ (b t − a)` over the given roots `a/b`.
fn poly_from_roots(roots: &[BigRational]) -> IntPolynomial {
    roots.iter().fold(IntPolynomial::one(), |acc, r| {
        acc * IntPolynomial::new(vec![-r.numer().clone(), r.denom().clone()])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn isolation_finds_known_rational_roots(roots in prop::collection::vec(small_rat(), 1..=6)) {
        let p = poly_from_roots(&roots);
        let mut want = roots.clone();
        want.sort();
        want.dedup();
        let got = isolate_real_roots(&p).unwrap();
        prop_assert_eq!(got.len(), want.len());
        prop_assert_eq!(count_real_roots(&p), want.len());
        for (g, w) in got.iter().zip(&want) {
            prop_assert_eq!(g.cmp_rational(w), Ordering::Equal);
        }
        let top = largest_real_root(&p).unwrap().unwrap();
        prop_assert_eq!(top.cmp_rational(want.last().unwrap()), Ordering::Equal);
    }

    #[test]
    fn square_roots_against_integer_squares(m in 2i64..10_000, q in small_rat()) {
        prop_assume!((m as f64).sqrt().fract() != 0.0);
        let p = IntPolynomial::from_i64(&[-m, 0, 1]);
        let r = largest_real_root(&p).unwrap().unwrap();
        // sign of r² − q² decides the comparison of √m with |q| exactly
        let sign = r.sign_of(&IntPolynomial::new(vec![-(q.numer() * q.numer()), BigInt::zero(), q.denom() * q.denom()]));
        let want = (BigInt::from(m) * q.denom() * q.denom()).cmp(&(q.numer() * q.numer()));
        prop_assert_eq!(sign, want);
        let iv = r.refine(&ten_pow_neg(15));
        prop_assert!(iv.lo() * iv.lo() <= rint(m) && iv.hi() * iv.hi() >= rint(m));
        prop_assert!(width_f64(&iv) <= 1e-15);
    }

    #[test]
    fn kth_roots_raise_back(num in 1i64..500, den in 1i64..50, k in 1u32..=5) {
        let x = rat(num, den);
        let r = rational_kth_root(&x, k);
        let iv = r.refine(&ten_pow_neg(20)).powi(k);
        prop_assert!(iv.contains(&x));
    }

    #[test]
    fn interval_arithmetic_contains_pointwise((i, x) in interval_with_point(), (j, y) in interval_with_point()) {
        prop_assert!((i.clone() + j.clone()).contains(&(x.clone() + y.clone())));
        prop_assert!((i.clone() - j.clone()).contains(&(x.clone() - y.clone())));
        prop_assert!((i.clone() * j.clone()).contains(&(x.clone() * y.clone())));
        prop_assert!(i.powi(3).contains(&(x.clone() * x.clone() * x.clone())));
        if let Some(q) = i.div(&j) {
            prop_assert!(!y.is_zero());
            prop_assert!(q.contains(&(x.clone() / y.clone())));
        } else {
            prop_assert!(j.contains_zero());
        }
        prop_assert!(i.abs().contains(&x.abs()));
        prop_assert!(i.hull(&j).contains(&x) && i.hull(&j).contains(&y));
    }

    #[test]
    fn logarithms_are_additive_and_tight(a in 1u64..1_000_000_000, b in 1u64..1_000_000, bits in 20u32..120) {
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        let la = ln_int(&a, bits).unwrap();
        let lb = ln_int(&b, bits).unwrap();
        let lab = ln_int(&(&a * &b), bits).unwrap();
        prop_assert!(lab.overlaps(&(la.clone() + lb.clone())));
        prop_assert!(width_f64(&la) <= 2f64.powi(-(bits as i32) + 3));
        let f = (a.to_string().parse::<f64>().unwrap()).ln();
        let (lo, hi) = la.to_f64_pair();
        let slack = 1e-12 * f.max(1.0);
        prop_assert!(lo - slack <= f && f <= hi + slack, "ln {a} = {f} outside [{lo}, {hi}]");
        let lq = ln_rational(&BigRational::new(a.clone(), b.clone()), bits).unwrap();
        prop_assert!(lq.overlaps(&(la - lb)));
    }

    #[test]
    fn exp_inverts_log(n in 1i64..100_000) {
        let l = ln_int(&BigInt::from(n), 80).unwrap();
        prop_assert!(exp_interval(&l, 80).contains(&rint(n)));
    }

    #[test]
    fn algebraic_comparison_is_consistent(m1 in 2i64..200, m2 in 2i64..200) {
        let a = largest_real_root(&IntPolynomial::from_i64(&[-m1, 0, 1])).unwrap().unwrap();
        let b = largest_real_root(&IntPolynomial::from_i64(&[-m2, 0, 1])).unwrap().unwrap();
        prop_assert_eq!(a.cmp_value(&b), m1.cmp(&m2));
        prop_assert_eq!(a.neg().cmp_value(&b.neg()), m2.cmp(&m1));
        prop_assert_eq!(a.neg().abs().cmp_value(&a), Ordering::Equal);
    }

    #[test]
    fn rational_root_splitting((roots, extra) in (prop::collection::vec(small_rat(), 0..=3), 2i64..50)) {
        prop_assume!((extra as f64).sqrt().fract() != 0.0);
        let irr = IntPolynomial::from_i64(&[-extra, 0, 1]);
        let p = poly_from_roots(&roots) * irr.clone();
        let (linear, rest) = p.split_rational_roots();
        prop_assert_eq!(linear.len(), roots.len());
        prop_assert_eq!(rest.primitive().degree(), Some(2));
        let back = linear.into_iter().fold(rest, |acc, l| acc * l);
        prop_assert_eq!(back.primitive(), p.primitive());
        prop_assert!(p.squarefree_part().degree().unwrap() <= p.degree().unwrap());
    }
}
