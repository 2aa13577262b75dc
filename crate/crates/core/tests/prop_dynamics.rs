use arithdyn::dynsys::*;
use arithdyn::heights::{factor_heights, FactoredPoint, MultiProjPoint};
use arithdyn::IntMatrix;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn wehler() -> System {
    System::Wehler(
        WehlerSystem::standard(
            WehlerSystem::coeffs_from_i64(&[
                [[0, -1, 0], [0, -1, 1], [2, 0, 1]],
                [[1, -2, -2], [-2, 1, 1], [1, 2, 2]],
                [[1, 0, 0], [1, 0, -2], [0, -1, -2]],
            ]),
            vec![1, 2, 3],
        )
        .unwrap(),
    )
}

fn sample() -> MultiProjPoint {
    MultiProjPoint::from_i64(&[vec![1, 0], vec![1, 0], vec![1, 0]]).unwrap()
}

fn nonzero(r: i64) -> impl Strategy<Value = i64> {
    (1..=r, any::<bool>()).prop_map(|(x, s)| if s { x } else { -x })
}

fn torus_point(k: usize) -> impl Strategy<Value = MultiProjPoint> {
    prop::collection::vec((nonzero(9), 1i64..=9), k)
        .prop_map(|v| MultiProjPoint::from_i64(&v.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>()).unwrap())
}

fn monomial_2x2() -> impl Strategy<Value = MonomialSystem> {
    prop::collection::vec(-3i64..=3, 4)
        .prop_filter("invertible", |v| v[0] * v[3] != v[1] * v[2])
        .prop_map(|v| MonomialSystem::from_i64(&[vec![v[0], v[1]], vec![v[2], v[3]]]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn heights_ignore_scaling(a in -50i64..=50, b in -50i64..=50, k in 1i64..=30) {
        prop_assume!(a != 0 || b != 0);
        let p = MultiProjPoint::from_i64(&[vec![a, b]]).unwrap();
        let q = MultiProjPoint::from_i64(&[vec![k * a, k * b]]).unwrap();
        prop_assert_eq!(&p, &q);
        let g = num_integer::gcd(a, b);
        let want = ((a / g).abs().max((b / g).abs()) as f64).ln();
        let h = factor_heights(&p).total(60);
        prop_assert!((h.mid_f64() - want).abs() < 1e-12);
    }

    #[test]
    fn vieta_returns_the_other_root(u1 in -20i64..=20, v1 in -20i64..=20, u2 in -20i64..=20, v2 in -20i64..=20) {
        prop_assume!((u1, v1) != (0, 0) && (u2, v2) != (0, 0));
        // (v1 u − u1 v)(v2 u − u2 v)
        let a = BigInt::from(v1 * v2);
        let b = BigInt::from(-(v1 * u2 + u1 * v2));
        let c = BigInt::from(u1 * u2);
        let other = vieta_other_root(&a, &b, &c, (&BigInt::from(u1), &BigInt::from(v1))).unwrap();
        let want = MultiProjPoint::from_i64(&[vec![u2, v2]]).unwrap();
        prop_assert_eq!(MultiProjPoint::new(vec![other]).unwrap(), want);
    }

    #[test]
    fn wehler_involutions_square_to_identity(word in prop::collection::vec(1usize..=3, 0..=5), axis in 1usize..=3) {
        let System::Wehler(w) = wehler() else { unreachable!() };
        let mut p = sample();
        for i in word {
            p = w.involution(i, &p).unwrap();
            prop_assert!(w.on_surface(&p).unwrap());
        }
        let q = w.involution(axis, &p).unwrap();
        prop_assert_eq!(w.involution(axis, &q).unwrap(), p);
    }

    #[test]
    fn wehler_inverse_undoes_forward(steps in 0usize..=3) {
        let s = wehler();
        let inv = s.inverse().unwrap();
        let mut p = sample();
        for _ in 0..steps {
            p = s.apply(&p).unwrap();
        }
        let q = s.apply(&p).unwrap();
        prop_assert_eq!(inv.apply(&q).unwrap(), p);
    }

    #[test]
    fn factored_orbits_match_explicit(m in monomial_2x2(), p in torus_point(2), steps in 1i64..=6) {
        let s = System::Monomial(m);
        let rec = iterate_orbit(&s, &p, steps, &OrbitOptions::default()).unwrap();
        let mut q = p.clone();
        for e in &rec.entries {
            let explicit = e.point.explicit(1 << 20).unwrap();
            prop_assert_eq!(&explicit, &q);
            prop_assert!(e.h.overlaps(&factor_heights(&q).total(44)));
            q = s.apply(&q).unwrap();
        }
    }

    #[test]
    fn monomial_inverse_orbits(m in prop::collection::vec(-2i64..=2, 4), p in torus_point(2)) {
        prop_assume!((m[0] * m[3] - m[1] * m[2]).abs() == 1);
        let s = System::Monomial(MonomialSystem::from_i64(&[vec![m[0], m[1]], vec![m[2], m[3]]]).unwrap());
        let back = iterate_orbit(&s, &p, -3, &OrbitOptions::default()).unwrap();
        let mut q = back.last().point.explicit(1 << 20).unwrap();
        for _ in 0..3 {
            q = s.apply(&q).unwrap();
        }
        prop_assert_eq!(q, p);
    }

    #[test]
    fn power_map_heights_scale_by_degree(d in 2u32..=4, p in torus_point(1), steps in 1i64..=5) {
        let s = System::Power(PowerSystem::new(d, 1).unwrap());
        let rec = iterate_orbit(&s, &p, steps, &OrbitOptions::default()).unwrap();
        let h0 = rec.entries[0].h.mid_f64();
        for e in &rec.entries {
            let want = h0 * (d as f64).powi(e.n as i32);
            prop_assert!((e.h.mid_f64() - want).abs() <= 1e-9 * want.max(1.0));
        }
    }

    #[test]
    fn factored_points_round_trip(p in torus_point(3)) {
        let mut f = FactoredPoint::from_point(&p);
        f.normalize();
        prop_assert_eq!(f.to_point(1 << 20).unwrap(), p.clone());
        let hf = f.heights().total(50);
        prop_assert!(hf.overlaps(&factor_heights(&p).total(50)));
    }
}

#[test]
fn monomial_pullback_is_transpose() {
    let s = System::Monomial(MonomialSystem::from_i64(&[vec![2, 1], vec![1, 1]]).unwrap());
    let pm = s.pullback_matrix().unwrap();
    assert_eq!(pm.matrix, IntMatrix::from_i64(&[vec![2, 1], vec![1, 1]]).transpose());
    assert_eq!(pm.degree().to_i64(), Some(1));
    assert!(!s.is_automorphism());
}
