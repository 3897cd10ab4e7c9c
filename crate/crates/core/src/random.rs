//! Seeded generators for randomized instances.
//!
//! Every generator is a pure function of its seed, so randomized suites
//! are reproducible and stream terms can be regenerated on demand.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decay::{DecayStream, IndexMap, PolyFamily};
use crate::field::Field;
use crate::ideal::AdicIdeal;
use crate::lift::{AdicSystem, SystemLevel};
use crate::poly::{Monomial, Polynomial};
use crate::tower::TowerElement;
use crate::truncate::ModulePresentation;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent generator for item `index` under `seed`.
pub fn derive(seed: u64, index: u64) -> Rng64 {
    let mut r = rng(seed);
    r.set_stream(index);
    r
}

pub fn coefficient(rng: &mut Rng64, field: Field) -> crate::field::Coeff {
    field.from_i64(rng.gen_range(-3..=3))
}

/// A monomial of exactly the given degree in `vars`.
pub fn monomial(rng: &mut Rng64, vars: &[u32], degree: usize) -> Monomial {
    (0..degree).fold(Monomial::one(), |m, _| m.mul(&Monomial::var(*vars.choose(rng).expect("variables"))))
}

/// Up to `max_terms` terms of degree `<= max_deg`.
pub fn poly(rng: &mut Rng64, field: Field, vars: &[u32], max_deg: usize, max_terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(field);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let d = rng.gen_range(0..=max_deg);
        p.add_term(monomial(rng, vars, d), coefficient(rng, field));
    }
    p
}

/// A nonzero homogeneous polynomial of the given degree.
pub fn homogeneous(rng: &mut Rng64, field: Field, vars: &[u32], degree: usize, max_terms: usize) -> Polynomial {
    loop {
        let mut p = Polynomial::zero(field);
        for _ in 0..max_terms.max(1) {
            p.add_term(monomial(rng, vars, degree), coefficient(rng, field));
        }
        if !p.is_zero() {
            return p;
        }
    }
}

/// A presentation over `a = (vars)` of rank `1..=max_rank` with relations
/// of degree `<= max_deg` without constant terms.
pub fn presentation(
    rng: &mut Rng64,
    field: Field,
    vars: &[u32],
    max_rank: usize,
    max_rels: usize,
    max_deg: usize,
) -> ModulePresentation {
    let rank = rng.gen_range(1..=max_rank);
    let nrels = rng.gen_range(0..=max_rels);
    let relations = (0..nrels)
        .map(|_| (0..rank).map(|_| poly(rng, field, vars, max_deg, 2).filter_terms(|m| !m.is_one())).collect())
        .collect();
    ModulePresentation::new(field, AdicIdeal::vars(vars.iter().copied()), rank, relations).expect("variables in ideal")
}

/// A ring stream over `a = (vars)`: `head` arbitrary terms, then terms of
/// order at least `z - head + 1`, so `N_i = i + head`.
pub fn decaying_stream(field: Field, vars: &[u32], seed: u64, head: usize) -> DecayStream {
    let vars = vars.to_vec();
    let ring = Arc::new(ModulePresentation::ring(field, AdicIdeal::vars(vars.iter().copied())));
    let r = ring.clone();
    DecayStream::new(
        ring,
        Arc::new(move |z| {
            let mut g = derive(seed, z as u64);
            let p = if z < head {
                poly(&mut g, field, &vars, 2, 3)
            } else {
                let lead = monomial(&mut g, &vars, z - head + 1);
                poly(&mut g, field, &vars, 1, 2).mul_monomial(&lead)
            };
            TowerElement::from_element(vec![p], r.clone())
        }),
        Arc::new(move |i| Some(i + head)),
    )
}

/// A bounded family `z -> p_z` with `deg p_z <= 2`.
pub fn poly_family(field: Field, vars: &[u32], seed: u64) -> PolyFamily {
    let vars = vars.to_vec();
    Arc::new(move |z| {
        let mut g = derive(seed ^ 0x5eed, z as u64);
        poly(&mut g, field, &vars, 2, 3)
    })
}

/// One of `k -> k / d`, `k -> c`, `k -> k mod m`, `k -> k + s`.
pub fn index_map(rng: &mut Rng64) -> IndexMap {
    match rng.gen_range(0..4) {
        0 => {
            let d = rng.gen_range(1..=3);
            Arc::new(move |k| k / d)
        }
        1 => {
            let c = rng.gen_range(0..3);
            Arc::new(move |_| c)
        }
        2 => {
            let m = rng.gen_range(1..=3);
            Arc::new(move |k| k % m)
        }
        _ => {
            let s = rng.gen_range(0..3);
            Arc::new(move |k| k + s)
        }
    }
}

/// `I + t E` with `t` a random ideal variable; with `fix_first` the first
/// column of `E` is zero.
fn unit_matrix(rng: &mut Rng64, field: Field, vars: &[u32], n: usize, fix_first: bool) -> Vec<Vec<Polynomial>> {
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let mut p = Polynomial::from_i64(field, i64::from(r == c));
                    if !(fix_first && c == 0) {
                        let t = Monomial::var(*vars.choose(rng).expect("variables"));
                        p = &p + &poly(rng, field, vars, 1, 2).mul_monomial(&t);
                    }
                    p
                })
                .collect()
        })
        .collect()
}

/// A flat adic system of rank `n` on levels `0..=top`. Each level is either
/// free of rank `n` or has a redundant extra generator; transitions are unit
/// twists. With `inject = Some(j)`, levels `>= j` also kill `t^j e_1`, which
/// keeps the transitions valid but makes `M_j` non-free over `A_j`.
pub fn flat_system(
    rng: &mut Rng64,
    field: Field,
    vars: &[u32],
    n: usize,
    top: usize,
    inject: Option<usize>,
) -> AdicSystem {
    let ideal = AdicIdeal::vars(vars.iter().copied());
    let extras: Vec<Option<Vec<Polynomial>>> =
        (0..=top).map(|_| rng.gen_bool(0.4).then(|| (0..n).map(|_| poly(rng, field, vars, 1, 2)).collect())).collect();
    let mut levels = Vec::with_capacity(top + 1);
    for i in 0..=top {
        let rank = n + usize::from(extras[i].is_some());
        let mut relations = Vec::new();
        if let Some(c) = &extras[i] {
            let mut rel = c.clone();
            rel.push(Polynomial::from_i64(field, -1));
            relations.push(rel);
        }
        if let Some(j) = inject.filter(|&j| i >= j) {
            let mut rel = vec![Polynomial::zero(field); rank];
            rel[0] = Polynomial::monomial(field, Monomial::var_pow(vars[0], j as u32));
            relations.push(rel);
        }
        let psi = (i > 0).then(|| {
            let u = unit_matrix(rng, field, vars, n, inject.is_some());
            let prev_rank = n + usize::from(extras[i - 1].is_some());
            let mut columns: Vec<Vec<Polynomial>> = (0..n).map(|c| (0..n).map(|r| u[r][c].clone()).collect()).collect();
            if let Some(c) = &extras[i] {
                let image =
                    (0..n).map(|r| (0..n).fold(Polynomial::zero(field), |acc, k| &acc + &(&u[r][k] * &c[k]))).collect();
                columns.push(image);
            }
            for col in &mut columns {
                col.resize(prev_rank, Polynomial::zero(field));
            }
            (0..prev_rank).map(|r| columns.iter().map(|col| col[r].clone()).collect()).collect()
        });
        let module = ModulePresentation::new(field, ideal.clone(), rank, relations).expect("ideal variables");
        levels.push(SystemLevel { module, psi });
    }
    AdicSystem::new(field, ideal, levels).expect("well-formed system")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::lift::basis_lift;

    #[test]
    fn streams_are_reproducible() {
        let a = decaying_stream(Field::Rational, &[1, 2], 7, 2);
        let b = decaying_stream(Field::Rational, &[1, 2], 7, 2);
        assert!(a.agrees_with(&b, 4).unwrap());
        a.check(6).unwrap();
    }

    #[test]
    fn generated_systems_behave() {
        for seed in 0..5 {
            let mut g = rng(seed);
            let s = flat_system(&mut g, Field::Rational, &[1, 2], 2, 3, None);
            assert_eq!(basis_lift(&s, 3).unwrap().rank, 2);
            let bad = flat_system(&mut g, Field::Rational, &[1, 2], 2, 3, Some(2));
            assert!(matches!(basis_lift(&bad, 3), Err(Error::NotFlat { level: 2, .. })));
        }
    }
}
