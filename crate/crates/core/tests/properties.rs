use curvecount::engine::Engine;
use curvecount::kernel::{base_value, CanonicalKey, Quadruple};
use curvecount::lattice::{DivisorClass, SurfaceModel};
use curvecount::tangency::{vec_binom, TangencyVector};
use proptest::prelude::*;

fn tangency(max_index: u32, max_mult: u32) -> impl Strategy<Value = TangencyVector> {
    prop::collection::vec((1..=max_index, 0..=max_mult), 0..4).prop_map(TangencyVector::from_pairs)
}

fn add(u: &TangencyVector, v: &TangencyVector) -> TangencyVector {
    let mut out = u.clone();
    out += v;
    out
}

fn class(rank: usize) -> impl Strategy<Value = DivisorClass> {
    (0..6i32, prop::collection::vec(-2..4i32, rank)).prop_map(|(d, exc)| DivisorClass::new(d, exc))
}

proptest! {
    #[test]
    fn additivity(u in tangency(5, 3), v in tangency(5, 3)) {
        let w = add(&u, &v);
        prop_assert_eq!(w.weight(), u.weight() + v.weight());
        prop_assert_eq!(w.norm(), u.norm() + v.norm());
        prop_assert_eq!(w.power(), u.power() * v.power());
    }

    #[test]
    fn vandermonde(g in tangency(4, 2), d in tangency(4, 2), extra in tangency(4, 2)) {
        let gd = add(&g, &d);
        let beta = add(&gd, &extra);
        let rest = beta.checked_sub(&g).unwrap();
        prop_assert_eq!(
            vec_binom(&beta, &g) * vec_binom(&rest, &d),
            vec_binom(&beta, &gd) * vec_binom(&gd, &g)
        );
    }

    #[test]
    fn subvector_count(beta in tangency(4, 3)) {
        let subs = beta.subvectors();
        let expected: usize = beta.iter().map(|(_, m)| m as usize + 1).product();
        prop_assert_eq!(subs.len(), expected);
        prop_assert!(subs.iter().all(|s| s.le(&beta)));
        let mut sorted = subs.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), subs.len());
    }

    #[test]
    fn text_round_trip(v in tangency(9, 4)) {
        let back: TangencyVector = v.to_string().parse().unwrap();
        prop_assert_eq!(back, v);
    }

    #[test]
    fn pairing_is_bilinear(x in class(7), y in class(7), z in class(7)) {
        prop_assert_eq!((&x + &y).dot(&z), x.dot(&z) + y.dot(&z));
        prop_assert_eq!(x.dot(&y), y.dot(&x));
    }

    #[test]
    fn key_round_trip(c in class(7), g in 0..3i32, alpha in tangency(3, 2), beta in tangency(3, 2)) {
        let model = SurfaceModel::new(6).unwrap();
        let key = Quadruple::new(c, g, alpha, beta).canonical_key(&model);
        let back: CanonicalKey = key.to_string().parse().unwrap();
        prop_assert_eq!(back, key);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn counts_ignore_conic_point_order(
        d in 1..4i32,
        d1 in 0..2i32,
        rest in prop::collection::vec(-1..2i32, 6),
        perm in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(),
        g in 0..2i32,
    ) {
        let model = SurfaceModel::new(6).unwrap();
        let c = DivisorClass::new(d, std::iter::once(d1).chain(rest.iter().copied()));
        let p = DivisorClass::new(d, std::iter::once(d1).chain(perm.iter().map(|&i| rest[i])));
        prop_assume!(c.de() >= 0);
        let beta = TangencyVector::unit(1, c.de() as u32);
        let q = Quadruple::new(c, g, TangencyVector::zero(), beta.clone());
        let qp = Quadruple::new(p, g, TangencyVector::zero(), beta);
        prop_assert_eq!(base_value(&q), base_value(&qp));
        prop_assert_eq!(q.r_value(), qp.r_value());
        let mut raw = Engine::without_symmetry(model);
        prop_assert_eq!(raw.count(&q), raw.count(&qp));
    }
}
