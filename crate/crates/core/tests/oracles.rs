mod common;

use std::sync::Arc;

use adic::lift::free_cover;
use adic::random;
use adic::{parse_poly, AdicIdeal, Field, ModulePresentation, Polynomial};

use common::*;

fn q(s: &str) -> Polynomial {
    parse_poly(s, Field::Rational).unwrap()
}

#[test]
fn groebner_membership_matches_brute_force() {
    let cases = groebner_cases(0..24);
    let members = cases.iter().filter(|c| c.1).count();
    assert!(cases.len() > 100);
    assert!(members > 20 && members < cases.len(), "{members}/{} members", cases.len());
    assert!(cases.iter().all(|(engine, brute)| engine == brute));
}

#[test]
fn groebner_membership_on_fixed_ideals() {
    let gens = vec![q("t1^2 - t2^2"), q("t1*t2")];
    let ideal = AdicIdeal::general(gens.clone(), 12).unwrap();
    for f in ["t2^3", "t1^3", "t1^4", "t1^2*t2 - t2^3", "t1 + t2"] {
        let f = q(f);
        assert_eq!(ideal.power_membership(&f, 1).unwrap(), brute_power_membership(&f, &gens, 1, &[1, 2]), "{f}");
    }
}

#[test]
fn module_zero_test_matches_span_enumeration() {
    let cases = zero_test_suite();
    assert!(cases.iter().any(|c| c.1) && cases.iter().any(|c| !c.1));
    assert!(cases.iter().all(|(engine, brute)| engine == brute));
}

#[test]
fn free_cover_kernel_contains_relation() {
    let m =
        ModulePresentation::new(Field::Rational, AdicIdeal::vars([1, 2]), 2, vec![vec![q("t1"), q("-t2")]]).unwrap();
    let cover = free_cover(Arc::new(m), 3).unwrap();
    assert!(cover.surjective.iter().all(|&s| s));
    let mut span = SparseSpan::default();
    for k in &cover.kernel {
        span.insert(sparse(k));
    }
    assert!(span.contains(sparse(&[q("t1"), q("-t2")])));
    assert!(!span.contains(sparse(&[q("t1"), q("t2")])));
}

#[test]
fn level_dimension_matches_elimination() {
    for seed in 0..10 {
        let mut g = random::derive(0xd1, seed);
        let m = random::presentation(&mut g, Field::Rational, &[1, 2], 2, 2, 2);
        for level in 0..=3 {
            assert_eq!(
                m.level_dimension(level, &[1, 2]),
                level_dimension(m.relations(), m.rank(), &[1, 2], level as u32),
                "{m:?} at level {level}"
            );
        }
    }
}
