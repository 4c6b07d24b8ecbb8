mod common;

use common::*;
use hypdisc::hyperbolic::{
    act_sl2, bisector, cw_cyclic_cmp, direction_from_v, displacement_surrogate, dist_surrogate,
    halfplane_contains, phi_product_lt_one, Containment, Direction, Point,
};
use hypdisc::numberfield::rational;
use hypdisc::{FieldElement, FieldSpec, GroupElement, IsometryClass, Letter, Word};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn det(g: &GroupElement) -> FieldElement {
    g.a() * g.d() - g.b() * g.c()
}

fn field_triple() -> impl Strategy<Value = (FieldElement, FieldElement, FieldElement)> {
    spec_strategy().prop_flat_map(|k| (elem_in(k), elem_in(k), elem_in(k)))
}

fn letter_strategy(rank: usize) -> impl Strategy<Value = Letter> {
    (0..rank, any::<bool>()).prop_map(|(i, inv)| Letter::new(i, if inv { -1 } else { 1 }))
}

fn word_strategy(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter_strategy(rank), 0..=max_len).prop_map(Word::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_axioms((x, y, z) in field_triple()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &x * &y + &x * &z);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        if !x.is_zero() {
            prop_assert!((&x * &x.inverse().unwrap()).is_one());
        }
    }

    #[test]
    fn sign_is_multiplicative((x, y, _) in field_triple()) {
        prop_assert_eq!((&x * &y).signum(), x.signum() * y.signum());
        prop_assert!((&x * &x).signum() >= 0);
        prop_assert_eq!(x.signum(), interval_sign(&x));
    }

    #[test]
    fn canonical_form_is_stable(x in spec_strategy().prop_flat_map(elem_in)) {
        prop_assert!(x.a().denom().is_positive() && x.b().denom().is_positive());
        let again = x.spec().parse(&x.to_string()).unwrap();
        prop_assert_eq!(&again, &x);
        prop_assert_eq!(again.spec().parse(&again.to_string()).unwrap(), x.clone());
        if x.spec().is_rational() {
            prop_assert!(x.b().is_zero());
        }
    }

    #[test]
    fn determinant_survives_products(
        (gs, signs) in spec_strategy().prop_flat_map(|k| (
            prop::collection::vec(group_elem_in(k, 3), 1..=20),
            prop::collection::vec(any::<bool>(), 20),
        ))
    ) {
        let k = gs[0].spec();
        let mut acc = GroupElement::identity(k);
        for (g, inv) in gs.iter().zip(&signs) {
            acc = &acc * &if *inv { g.inverse() } else { g.clone() };
            prop_assert!(det(&acc).is_one());
        }
        prop_assert!((&acc * &acc.inverse()).is_identity());
    }

    #[test]
    fn projective_normalization(g in spec_strategy().prop_flat_map(|k| group_elem_in(k, 4))) {
        let p = g.normalize();
        prop_assert_eq!(&g.negate().normalize(), &p);
        prop_assert_eq!(&p.rep().normalize(), &p);
        prop_assert_eq!(&p.rep().negate().normalize(), &p);
    }

    #[test]
    fn words_evaluate_homomorphically(
        (gens, u, w) in spec_strategy().prop_flat_map(|k| (
            prop::collection::vec(group_elem_in(k, 3), 3),
            word_strategy(3, 10),
            word_strategy(3, 10),
        ))
    ) {
        let k = gens[0].spec();
        let pg = projective(&gens);
        let uw = u.concat_reduce(&w);
        prop_assert_eq!(uw.evaluate(&pg, k).unwrap(), u.evaluate(&pg, k).unwrap() * w.evaluate(&pg, k).unwrap());
        prop_assert_eq!(
            uw.evaluate_sl2(&gens, k).unwrap(),
            &u.evaluate_sl2(&gens, k).unwrap() * &w.evaluate_sl2(&gens, k).unwrap()
        );
        prop_assert!(u.concat_reduce(&u.inverse()).is_empty());
        prop_assert!(u.letters().windows(2).all(|p| p[1] != p[0].inverse()));
        prop_assert_eq!(Word::from_signed(&u.to_signed()).unwrap(), u.clone());
    }

    #[test]
    fn classification_is_conjugation_invariant(
        (g, h) in spec_strategy().prop_flat_map(|k| (group_elem_in(k, 4), group_elem_in(k, 4)))
    ) {
        let conj = &(&h * &g) * &h.inverse();
        prop_assert_eq!(conj.classify(), g.classify());
        let t = g.trace();
        let disc = (&t * &t - g.spec().int(4)).signum();
        let expect = match disc {
            -1 => IsometryClass::Elliptic,
            0 if g.is_projective_identity() => IsometryClass::Identity,
            0 => IsometryClass::Parabolic,
            _ => IsometryClass::Hyperbolic,
        };
        prop_assert_eq!(g.classify(), expect);
    }

    #[test]
    fn dist_surrogate_is_an_isometry_invariant(
        (g, w, z) in spec_strategy().prop_flat_map(|k| (group_elem_in(k, 4), point_in(k), point_in(k)))
    ) {
        let t = dist_surrogate(&w, &z);
        prop_assert_eq!(&t, &dist_surrogate(&z, &w));
        prop_assert_eq!(&t, &dist_surrogate(&act_sl2(&g, &w), &act_sl2(&g, &z)));
        let v = t.value();
        prop_assert!(!v.is_negative() && (v - v.spec().one()).is_negative());
        prop_assert_eq!(v.is_zero(), w == z);
    }

    #[test]
    fn displacement_of_inverse(g in spec_strategy().prop_flat_map(|k| group_elem_in(k, 5))) {
        let p = g.normalize();
        prop_assert_eq!(displacement_surrogate(&p), displacement_surrogate(&p.inverse()));
    }

    #[test]
    fn phi_test_is_symmetric(
        (g, h) in spec_strategy().prop_flat_map(|k| (group_elem_in(k, 3), group_elem_in(k, 3)))
    ) {
        let (g, h) = (g.normalize(), h.normalize());
        prop_assert_eq!(phi_product_lt_one(&g, &h), phi_product_lt_one(&h, &g));
    }

    #[test]
    fn bisector_separates(
        (c, q) in spec_strategy().prop_flat_map(|k| (point_in(k), point_in(k)))
    ) {
        prop_assume!(c != q);
        let b = bisector(&c, &q).unwrap();
        prop_assert_eq!(halfplane_contains(&b, &c), Containment::Inside);
        prop_assert_eq!(halfplane_contains(&b, &q), Containment::Outside);
    }

    #[test]
    fn bisector_passes_through_equidistant_points(
        (k, x, s, u, t, g) in spec_strategy().prop_flat_map(|k| (
            Just(k), elem_in(k), 1i64..9, 1i64..9, 1i64..7, group_elem_in(k, 4),
        ))
    ) {
        prop_assume!(s != u);
        // c = x + s²t·i and q = x + u²t·i are equidistant from x + sut·i
        let y = |n: i64| k.int(n * t);
        let c = Point::new(x.clone(), y(s * s)).unwrap();
        let q = Point::new(x.clone(), y(u * u)).unwrap();
        let p = Point::new(x, y(s * u)).unwrap();
        let b = bisector(&act_sl2(&g, &c), &act_sl2(&g, &q)).unwrap();
        prop_assert_eq!(halfplane_contains(&b, &act_sl2(&g, &p)), Containment::Boundary);
    }

    #[test]
    fn clockwise_order_is_cyclic(
        pts in spec_strategy().prop_flat_map(|k| prop::collection::vec(point_in(k), 4))
    ) {
        let v = Point::i(pts[0].spec());
        prop_assume!(pts.iter().all(|p| *p != v));
        let ds: Vec<Direction> = pts.iter().map(|p| direction_from_v(p).unwrap()).collect();
        let distinct = (0..4).all(|i| (0..4).all(|j| i == j || !ds[i].same_ray(&ds[j])));
        prop_assume!(distinct);
        let cw = |a: usize, b: usize, c: usize| cw_cyclic_cmp(&ds[a], &ds[b], &ds[c]);
        for (a, b, c) in [(0, 1, 2), (0, 2, 3), (1, 2, 3), (0, 1, 3)] {
            prop_assert!(cw(a, b, c) != cw(a, c, b));
            prop_assert_eq!(cw(a, b, c), cw(b, c, a));
        }
        if cw(0, 1, 2) && cw(0, 2, 3) {
            prop_assert!(cw(0, 1, 3));
        }
    }
}

#[test]
fn interval_oracle_on_close_pairs() {
    // 1351/780 is a convergent of √3
    let k = FieldSpec::new(3).unwrap();
    let x = k.element(rational(1351, 780), rational(-1, 1));
    assert_eq!(x.signum(), interval_sign(&x));
    assert_eq!(x.signum(), 1);
    let y = k.element(rational(-1351, 780), rational(1, 1));
    assert_eq!(y.signum(), -1);
}
