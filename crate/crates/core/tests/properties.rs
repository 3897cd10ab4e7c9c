use std::collections::BTreeSet;
use std::sync::Arc;

use adic::decay::{pairing, series_sum, TupleIndex};
use adic::ideal::DEFAULT_GROEBNER_CAP;
use adic::tower::towers_agree;
use adic::{
    parse_poly, AdicIdeal, DecayStream, Field, ModulePresentation, Monomial, OrderValue, Polynomial, TowerElement,
};
use proptest::prelude::*;

fn poly_in(field: Field) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -4i64..5), 0..5).prop_map(move |terms| {
        Polynomial::from_terms(
            field,
            terms.into_iter().map(|((a, b, c), k)| (Monomial::from_pairs([(1, a), (2, b), (3, c)]), field.from_i64(k))),
        )
    })
}

fn q_poly() -> impl Strategy<Value = Polynomial> {
    poly_in(Field::Rational)
}

fn f7_poly() -> impl Strategy<Value = Polynomial> {
    poly_in(Field::Prime(7))
}

fn ring_axioms(a: &Polynomial, b: &Polynomial, c: &Polynomial) -> Result<(), TestCaseError> {
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(&(a + b) + c, a + &(b + c));
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    prop_assert!((a + &-a).is_zero());
    prop_assert_eq!(a * &Polynomial::one(a.field()), a.clone());
    Ok(())
}

fn variable_ideal() -> AdicIdeal {
    AdicIdeal::vars([1, 2])
}

fn general_ideal() -> AdicIdeal {
    AdicIdeal::general(
        vec![parse_poly("t1^2 - t2", Field::Rational).unwrap(), parse_poly("t3", Field::Rational).unwrap()],
        10,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms_over_q(a in q_poly(), b in q_poly(), c in q_poly()) {
        ring_axioms(&a, &b, &c)?;
    }

    #[test]
    fn ring_axioms_over_f7(a in f7_poly(), b in f7_poly(), c in f7_poly()) {
        ring_axioms(&a, &b, &c)?;
    }

    #[test]
    fn substitute_zero_is_a_homomorphism(a in q_poly(), b in q_poly(), kill in prop::collection::btree_set(1u32..4, 0..3)) {
        let kill: BTreeSet<u32> = kill;
        prop_assert_eq!((&a * &b).substitute_zero(&kill), &a.substitute_zero(&kill) * &b.substitute_zero(&kill));
        prop_assert_eq!((&a + &b).substitute_zero(&kill), &a.substitute_zero(&kill) + &b.substitute_zero(&kill));
    }

    #[test]
    fn print_parse_round_trip(a in q_poly(), b in f7_poly()) {
        prop_assert_eq!(parse_poly(&a.to_string(), Field::Rational).unwrap(), a);
        prop_assert_eq!(parse_poly(&b.to_string(), Field::Prime(7)).unwrap(), b);
    }

    #[test]
    fn order_is_a_valuation(a in q_poly(), b in q_poly()) {
        let ideal = variable_ideal();
        let cap = 8;
        let (oa, ob) = (ideal.ord_ring(&a, cap), ideal.ord_ring(&b, cap));
        if let (OrderValue::Finite(x), OrderValue::Finite(y)) = (oa, ob) {
            prop_assert_eq!(ideal.ord_ring(&(&a * &b), cap), OrderValue::Finite(x + y));
            let sum = ideal.ord_ring(&(&a + &b), cap);
            prop_assert!(sum.cmp_floor(OrderValue::Finite(x.min(y))) != std::cmp::Ordering::Less);
        }
    }

    #[test]
    fn ultrametric(a in q_poly(), b in q_poly(), c in q_poly()) {
        let ideal = variable_ideal();
        let ab = ideal.dist_ring(&a, &b, 8).unwrap();
        let bc = ideal.dist_ring(&b, &c, 8).unwrap();
        let ac = ideal.dist_ring(&a, &c, 8).unwrap();
        let max = if ab.cmp_value(bc).is_ge() { ab } else { bc };
        prop_assert!(ac.cmp_value(max).is_le());
    }

    #[test]
    fn normal_forms_for_variable_ideals(a in q_poly(), i in 0usize..4, j in 0usize..4) {
        let ideal = variable_ideal();
        let nf = ideal.normal_form(&a, i).unwrap();
        prop_assert_eq!(ideal.normal_form(&nf, i).unwrap(), nf.clone());
        prop_assert!(ideal.power_membership(&(&a - &nf), i + 1).unwrap());
        let lo = i.min(j);
        prop_assert_eq!(ideal.normal_form(&nf, lo).unwrap(), ideal.normal_form(&a, lo).unwrap());
    }

    #[test]
    fn normal_forms_for_general_ideals(a in q_poly(), i in 0usize..3) {
        let ideal = general_ideal();
        let nf = ideal.normal_form(&a, i).unwrap();
        prop_assert_eq!(ideal.normal_form(&nf, i).unwrap(), nf.clone());
        prop_assert!(ideal.power_membership(&(&a - &nf), i + 1).unwrap());
        if i > 0 {
            prop_assert_eq!(ideal.normal_form(&nf, i - 1).unwrap(), ideal.normal_form(&a, i - 1).unwrap());
        }
    }

    #[test]
    fn tuple_encoding_is_a_bijection(n in 1usize..4, z in 0usize..500) {
        let index = TupleIndex::new(n);
        let t = index.decode(z);
        prop_assert_eq!(t.len(), n);
        prop_assert_eq!(index.encode(&t), z);
        if z > 0 {
            let prev: usize = index.decode(z - 1).iter().sum();
            prop_assert!(prev <= t.iter().sum::<usize>());
        }
    }

    #[test]
    fn towers_are_coherent(a in q_poly(), cap in 0usize..5) {
        let ring = Arc::new(ModulePresentation::ring(Field::Rational, variable_ideal()));
        let t = TowerElement::from_element(vec![a], ring.clone()).unwrap();
        let top = t.project(cap).unwrap();
        for i in 0..=cap {
            prop_assert_eq!(ring.project(&top, i).unwrap(), t.project(i).unwrap());
        }
    }

    #[test]
    fn series_sum_is_additive(s1 in 0u64..1000, s2 in 0u64..1000, head in 0usize..3) {
        let f = adic::random::decaying_stream(Field::Rational, &[1, 2], s1, head);
        let g = adic::random::decaying_stream(Field::Rational, &[1, 2], s2, 0);
        let cap = 4;
        let lhs = series_sum(&f.add(&g).unwrap(), cap).unwrap();
        let rhs = series_sum(&f, cap).unwrap().add(&series_sum(&g, cap).unwrap()).unwrap();
        prop_assert!(towers_agree(&lhs, &rhs, cap).unwrap());
    }

    #[test]
    fn pairing_is_bilinear_in_scalars(s in 0u64..1000, c in -3i64..4) {
        let f = adic::random::poly_family(Field::Rational, &[1, 2], s);
        let g = adic::random::decaying_stream(Field::Rational, &[1, 2], s ^ 7, 1);
        let c = Polynomial::from_i64(Field::Rational, c);
        let cap = 3;
        let lhs = pairing(&f, &g.scale(&c), cap).unwrap();
        let rhs = pairing(&f, &g, cap).unwrap().scale(&c);
        prop_assert!(towers_agree(&lhs, &rhs, cap).unwrap());
    }
}

#[test]
fn general_ideal_parse_syntax() {
    let parsed = AdicIdeal::parse("gens t1^2 - t2; t3", Field::Rational).unwrap();
    let built = AdicIdeal::general(
        vec![parse_poly("t1^2 - t2", Field::Rational).unwrap(), parse_poly("t3", Field::Rational).unwrap()],
        DEFAULT_GROEBNER_CAP,
    )
    .unwrap();
    assert_eq!(parsed, built);
}

#[test]
fn geom_stream_is_decaying() {
    let g = DecayStream::geom(Field::Rational);
    assert!(g.check(6).is_ok());
}
