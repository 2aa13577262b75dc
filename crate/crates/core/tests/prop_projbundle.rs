use std::collections::BTreeMap;

use arithdyn::projbundle::*;
use arithdyn::scalar::{rat, rint};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

type Chow = ChowElement<BigRational>;

/// Unreduced element of ℚ[D, F] as exponent pairs `(i, j)` of `DⁱFʲ`.
type Naive = BTreeMap<(usize, usize), BigRational>;

fn naive_mul(a: &Naive, b: &Naive) -> Naive {
    let mut out = Naive::new();
    for ((i, j), x) in a {
        for ((k, l), y) in b {
            *out.entry((i + k, j + l)).or_insert_with(BigRational::zero) += x * y;
        }
    }
    out
}

/// Rewrite one monomial at a time until only `Dⁱ` and `DⁱF` with `i < n` remain.
fn naive_reduce(mut a: Naive, n: usize, c1: i64) -> Chow {
    loop {
        let Some((&(i, j), _)) = a.iter().find(|(&(i, j), c)| !c.is_zero() && (j >= 2 || i >= n)) else {
            break;
        };
        let c = a.remove(&(i, j)).unwrap();
        if j >= 1 {
            // F² = 0, and Dⁱ F = Dⁱ⁻ⁿ · (−c₁ Dⁿ⁻¹ F²) = 0 for i ≥ n
            continue;
        }
        // Dⁱ = Dⁱ⁻ⁿ · Dⁿ = −c₁ Dⁱ⁻¹ F
        *a.entry((i - 1, 1)).or_insert_with(BigRational::zero) -= rint(c1) * c;
    }
    let mut p = vec![BigRational::zero(); n];
    let mut q = vec![BigRational::zero(); n];
    for ((i, j), c) in a.into_iter().filter(|(_, c)| !c.is_zero()) {
        if j == 0 { p[i] += c } else { q[i] += c }
    }
    Chow::from_parts(n, c1.into(), p, q).unwrap()
}

fn to_naive(x: &Chow) -> Naive {
    let mut out = Naive::new();
    for (i, c) in x.p().iter().enumerate() {
        out.insert((i, 0), c.clone());
    }
    for (i, c) in x.q().iter().enumerate() {
        out.insert((i, 1), c.clone());
    }
    out
}

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=3).prop_map(|(a, b)| rat(a, b))
}

fn element(n: usize, c1: i64) -> impl Strategy<Value = Chow> {
    (
        prop::collection::vec(small_rat(), n + 2),
        prop::collection::vec(small_rat(), n + 1),
    )
        .prop_map(move |(p, q)| Chow::from_parts(n, c1.into(), p, q).unwrap())
}

fn ring() -> impl Strategy<Value = (usize, i64)> {
    (1usize..=5, -4i64..=4)
}

fn triple() -> impl Strategy<Value = (Chow, Chow, Chow)> {
    ring().prop_flat_map(|(n, c1)| (element(n, c1), element(n, c1), element(n, c1)))
}

fn hn_type() -> impl Strategy<Value = HNType> {
    prop::collection::vec((1u32..=3, -5i64..=5), 1..=4).prop_map(|raw| {
        // sort by slope and drop repeated slopes so the type is valid
        let mut pieces: Vec<(u32, i64)> = raw;
        pieces.sort_by(|a, b| (rat(b.1, b.0 as i64)).cmp(&rat(a.1, a.0 as i64)));
        pieces.dedup_by(|a, b| rat(a.1, a.0 as i64) == rat(b.1, b.0 as i64));
        HNType::from_i64(&pieces).unwrap()
    })
}

fn rank_at_least_two() -> impl Strategy<Value = HNType> {
    hn_type().prop_filter("rank ≥ 2", |h| h.rank() >= 2 && h.rank() <= 5)
}

/// Endomorphism data that some map can realize: either `c₁ + nμ_min = 0`
/// with free `δ`, or `δ = deg_gⁿ⁻¹`.
fn consistent_data() -> impl Strategy<Value = BundleEndoData> {
    let balanced = (2usize..=5, -3i64..=3, 1i64..=4, 1i64..=9, 1i64..=3).prop_map(|(n, m, g, a, b)| {
        BundleEndoData::new(n, g.into(), rat(a, b), rint(m), BigInt::from(-(n as i64) * m)).unwrap()
    });
    let forced = (rank_at_least_two(), 1i64..=4).prop_map(|(hn, g)| {
        let delta = BigRational::from_integer(BigInt::from(g).pow((hn.rank() - 1) as u32));
        BundleEndoData::from_hn(&hn, g.into(), delta).unwrap()
    });
    prop_oneof![balanced, forced]
}

fn any_data() -> impl Strategy<Value = BundleEndoData> {
    (rank_at_least_two(), 1i64..=4, 1i64..=9, 1i64..=3)
        .prop_map(|(hn, g, a, b)| BundleEndoData::from_hn(&hn, g.into(), rat(a, b)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms((x, y, z) in triple()) {
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
        prop_assert_eq!(
            x.mul(&y.add(&z).unwrap()).unwrap(),
            x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
        );
        let one = Chow::constant(x.rank(), x.c1().clone(), BigRational::one()).unwrap();
        prop_assert_eq!(x.mul(&one).unwrap(), x.clone());
    }

    #[test]
    fn products_agree_with_naive_reduction((x, y, z) in triple()) {
        let n = x.rank();
        let c1: i64 = x.c1().try_into().unwrap();
        let naive = naive_mul(&naive_mul(&to_naive(&x), &to_naive(&y)), &to_naive(&z));
        prop_assert_eq!(naive_reduce(naive, n, c1), x.mul(&y).unwrap().mul(&z).unwrap());
    }

    #[test]
    fn reduction_is_confluent((n, c1) in ring(), a in 0usize..8, b in 0usize..8) {
        let c = BigInt::from(c1);
        let lhs = Chow::d_power(n, c.clone(), a).unwrap().mul(&Chow::d_power(n, c.clone(), b).unwrap()).unwrap();
        let rhs = Chow::d_power(n, c.clone(), a + b).unwrap();
        let iterated = Chow::d_class(n, c.clone()).unwrap().pow((a + b) as u32).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(&lhs, &iterated);
        let f = Chow::f_class(n, c).unwrap();
        prop_assert!(f.mul(&f).unwrap().is_zero());
    }

    #[test]
    fn ring_homomorphism_condition((n, c1) in ring(), a in small_rat(), d in small_rat()) {
        let n = n.max(2);
        let c = BigInt::from(c1);
        let hom = ChowAction { fiber: a.clone(), c: rint(c1) * (d.clone() - a.clone()) / rint(n as i64), d: d.clone() };
        let dd = Chow::d_class(n, c.clone()).unwrap();
        let f = Chow::f_class(n, c.clone()).unwrap();
        for (u, v) in [(&dd, &dd), (&f, &dd), (&dd.pow(n as u32 - 1).unwrap(), &dd)] {
            prop_assert_eq!(
                u.mul(v).unwrap().pullback(&hom).unwrap(),
                u.pullback(&hom).unwrap().mul(&v.pullback(&hom).unwrap()).unwrap()
            );
        }
        // shifting c breaks Dⁿ⁻¹·D unless d = 0
        let bad = ChowAction { c: hom.c.clone() + BigRational::one(), ..hom };
        let top = dd.pow(n as u32 - 1).unwrap();
        let same = top.mul(&dd).unwrap().pullback(&bad).unwrap()
            == top.pullback(&bad).unwrap().mul(&dd.pullback(&bad).unwrap()).unwrap();
        prop_assert_eq!(same, d.is_zero());
    }

    #[test]
    fn pullback_is_multiplicative_for_consistent_data(data in consistent_data(), i in 0usize..5, j in 0usize..5, fi in any::<bool>()) {
        prop_assert!(data.is_consistent());
        let fld = data.field();
        let act = pullback_action(&data);
        let n = data.n;
        let c1 = data.c1.clone();
        let mut x = ChowElement::<arithdyn::RatPolynomial>::d_power(n, c1.clone(), i % n).unwrap();
        if fi {
            x = x.mul(&ChowElement::f_class(n, c1.clone()).unwrap()).unwrap();
        }
        let y = ChowElement::d_power(n, c1, j % n).unwrap();
        let lhs = x.mul(&y).unwrap().pullback(&act.chow).unwrap();
        let rhs = x.pullback(&act.chow).unwrap().mul(&y.pullback(&act.chow).unwrap()).unwrap();
        for (l, r) in lhs.p().iter().zip(rhs.p()).chain(lhs.q().iter().zip(rhs.q())) {
            prop_assert!(fld.eq(l, r));
        }
    }

    #[test]
    fn eigenvectors_and_degree_identity(data in any_data()) {
        let e = eigenvector_check(&data);
        prop_assert!(e.fiber && e.nef_boundary);
        prop_assert!(degree_identity_check(&data).unwrap().equal);
    }

    #[test]
    fn dichotomy_tracks_key(data in any_data()) {
        let r = dichotomy_classify(&data);
        prop_assert_eq!(r.key.0.is_zero(), r.class != Dichotomy::ForcedBaseEquality);
        if r.consistent && !r.key.0.is_zero() {
            prop_assert!(data.d_equals_deg_g());
        }
    }

    #[test]
    fn slope_inequalities(hn in hn_type()) {
        let s = slope_stats(&hn).unwrap();
        if hn.pieces().len() > 1 {
            prop_assert!(s.mu_max > s.mu && s.mu > s.mu_min && !s.semistable);
        } else {
            prop_assert!(s.mu_max == s.mu && s.mu == s.mu_min && s.semistable);
        }
    }

    #[test]
    fn split_bundles(degrees in prop::collection::vec(-4i64..=4, 1..=5)) {
        let hn = HNType::split(&degrees).unwrap();
        prop_assert_eq!(hn.rank(), degrees.len());
        prop_assert_eq!(hn.degree(), BigInt::from(degrees.iter().sum::<i64>()));
        prop_assert_eq!(hn.mu_min(), rint(*degrees.iter().min().unwrap()));
    }
}
