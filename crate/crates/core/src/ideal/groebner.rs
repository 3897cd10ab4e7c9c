//! Degree-capped Buchberger over graded-lex.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};

/// Full normal form of `f` modulo `basis`: every term of the result is
/// irreducible by the leading terms of `basis`.
pub fn reduce(f: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    let leads: Vec<(&Monomial, _)> =
        basis.iter().filter_map(|g| g.leading_term().map(|(m, c)| (m, (g, c.clone())))).collect();
    let mut rest = f.clone();
    let mut out = Polynomial::zero(f.field());
    while let Some((m, c)) = rest.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
        let divisor = leads.iter().find(|(lm, _)| lm.divides(&m));
        match divisor {
            Some((lm, (g, lc))) => {
                let q = lm.quotient_of(&m).expect("divides");
                let factor = c.div(lc);
                rest = &rest - &g.mul_monomial(&q).scale(&factor);
            }
            None => {
                out.add_term(m.clone(), c.clone());
                rest = &rest - &Polynomial::term(c, m);
            }
        }
    }
    out
}

fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let (mf, cf) = f.leading_term().expect("nonzero");
    let (mg, cg) = g.leading_term().expect("nonzero");
    let l = mf.lcm(mg);
    let a = f.mul_monomial(&mf.quotient_of(&l).unwrap()).scale(&cf.inv().unwrap());
    let b = g.mul_monomial(&mg.quotient_of(&l).unwrap()).scale(&cg.inv().unwrap());
    &a - &b
}

/// Computes a reduced Gröbner basis with respect to graded-lex.
///
/// For homogeneous generators, S-pairs of degree above `degree_cap` are
/// skipped: the result is then a truncated basis that decides membership
/// exactly for every polynomial of degree `<= degree_cap`. For inhomogeneous
/// generators any such pair aborts with [`Error::GroebnerCapExhausted`],
/// since a degree fall could otherwise be missed.
pub fn groebner_basis(gens: &[Polynomial], degree_cap: u32) -> Result<Vec<Polynomial>> {
    let homogeneous = gens.iter().all(Polynomial::is_homogeneous);
    let mut basis: Vec<Polynomial> = Vec::new();
    let mut achieved = 0;
    for g in gens.iter().filter(|g| !g.is_zero()) {
        let d = g.degree().unwrap();
        if d > degree_cap {
            if homogeneous {
                continue;
            }
            return Err(Error::GroebnerCapExhausted { achieved, cap: degree_cap });
        }
        achieved = achieved.max(d);
        basis.push(g.monic());
    }

    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    let push_pairs = |pairs: &mut BTreeSet<(u32, usize, usize)>, basis: &[Polynomial], j: usize| {
        let lj = basis[j].leading_term().unwrap().0.clone();
        for (i, bi) in basis.iter().enumerate().take(j) {
            let li = bi.leading_term().unwrap().0;
            if li.is_coprime(&lj) {
                continue;
            }
            pairs.insert((li.lcm(&lj).degree(), i, j));
        }
    };
    for j in 0..basis.len() {
        push_pairs(&mut pairs, &basis, j);
    }

    while let Some(&(deg, i, j)) = pairs.iter().next() {
        pairs.remove(&(deg, i, j));
        if deg > degree_cap {
            if homogeneous {
                continue;
            }
            return Err(Error::GroebnerCapExhausted { achieved, cap: degree_cap });
        }
        let r = reduce(&s_polynomial(&basis[i], &basis[j]), &basis);
        if !r.is_zero() {
            achieved = achieved.max(deg);
            basis.push(r.monic());
            push_pairs(&mut pairs, &basis, basis.len() - 1);
        }
    }
    Ok(interreduce(basis))
}

fn interreduce(mut basis: Vec<Polynomial>) -> Vec<Polynomial> {
    basis.sort_by(|a, b| a.leading_term().unwrap().0.cmp(b.leading_term().unwrap().0));
    let mut minimal: Vec<Polynomial> = Vec::new();
    for g in basis {
        let lg = g.leading_term().unwrap().0;
        if !minimal.iter().any(|h| h.leading_term().unwrap().0.divides(lg)) {
            minimal.push(g);
        }
    }
    let n = minimal.len();
    (0..n)
        .map(|k| {
            let others: Vec<Polynomial> =
                minimal.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, g)| g.clone()).collect();
            reduce(&minimal[k], &others).monic()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::poly::parse_poly;

    fn q(s: &str) -> Polynomial {
        parse_poly(s, Field::Rational).unwrap()
    }

    #[test]
    fn monomial_generators_are_a_basis() {
        let g = groebner_basis(&[q("t1^2"), q("t2")], 6).unwrap();
        let set: BTreeSet<String> = g.iter().map(|p| p.to_string()).collect();
        assert_eq!(set, ["t1^2", "t2"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn single_generator() {
        let g = groebner_basis(&[q("t1^2 - t1^3")], 6).unwrap();
        assert_eq!(g, vec![q("t1^3 - t1^2")]);
    }

    #[test]
    fn classic_cyclic_example() {
        // (x^2 - y, xy - 1): reduced basis contains a univariate polynomial in y.
        let g = groebner_basis(&[q("t1^2 - t2"), q("t1*t2 - 1")], 10).unwrap();
        for p in &g {
            assert!(reduce(&q("t1^2 - t2"), &g).is_zero());
            assert!(reduce(p, &g).is_zero());
        }
        assert!(reduce(&q("t2^2 - t1"), &g).is_zero());
        assert!(!reduce(&q("t1"), &g).is_zero());
    }

    #[test]
    fn inhomogeneous_cap_is_reported() {
        let r = groebner_basis(&[q("t1^2 - t2"), q("t1*t2 - 1")], 2);
        assert!(matches!(r, Err(Error::GroebnerCapExhausted { cap: 2, .. })));
    }
}
