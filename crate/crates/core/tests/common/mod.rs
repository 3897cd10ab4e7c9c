//! Independent reference computations for the integration tests: plain
//! sparse elimination over Q, brute-force ideal membership, and span
//! enumeration over small prime fields. None of this calls into the
//! engine's linear algebra or Groebner code.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use adic::field::Coeff;
use adic::{Field, Monomial, Polynomial};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `(coordinate, exponent pairs)`.
pub type Key = (usize, Vec<(u32, u32)>);
pub type SparseVec = BTreeMap<Key, BigRational>;

pub fn rational(c: &Coeff) -> BigRational {
    match c {
        Coeff::Q(q) => q.clone(),
        Coeff::Fp { .. } => panic!("rational coefficients expected"),
    }
}

pub fn sparse(v: &[Polynomial]) -> SparseVec {
    let mut out = SparseVec::new();
    for (k, p) in v.iter().enumerate() {
        for (m, c) in p.terms() {
            out.insert((k, m.pairs().to_vec()), rational(c));
        }
    }
    out
}

/// Row-echelon span; each row is normalized at its smallest key.
#[derive(Default)]
pub struct SparseSpan {
    rows: BTreeMap<Key, SparseVec>,
}

impl SparseSpan {
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        while let Some(k) = v.keys().find(|k| self.rows.contains_key(*k)).cloned() {
            let c = v[&k].clone();
            for (kk, rc) in &self.rows[&k] {
                let e = v.entry(kk.clone()).or_insert_with(BigRational::zero);
                *e -= &c * rc;
                if e.is_zero() {
                    v.remove(kk);
                }
            }
        }
        v
    }

    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(v);
        let Some((k, lead)) = r.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = BigRational::one() / lead;
        self.rows.insert(k, r.into_iter().map(|(kk, c)| (kk, c * &inv)).collect());
        true
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// All exponent vectors over `vars` with total degree in `lo..=hi`.
pub fn monomials(vars: &[u32], lo: u32, hi: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for &v in vars {
        out = out
            .into_iter()
            .flat_map(|m| (0..=hi).map(move |e| m.mul(&Monomial::var_pow(v, e))))
            .filter(|m| m.degree() <= hi)
            .collect();
    }
    out.retain(|m| m.degree() >= lo);
    out.sort();
    out.dedup();
    out
}

/// Products of `i` generators, with repetition.
pub fn power_products(gens: &[Polynomial], i: usize, field: Field) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::one(field)];
    for _ in 0..i {
        out = out.iter().flat_map(|p| gens.iter().map(move |g| p * g)).collect();
    }
    out
}

/// `f in (gens)^i` for homogeneous generators: `f` is a `Q`-combination of
/// `m * p` with `p` a product of `i` generators and `deg(m p) <= deg f`.
pub fn brute_power_membership(f: &Polynomial, gens: &[Polynomial], i: usize, vars: &[u32]) -> bool {
    if f.is_zero() {
        return true;
    }
    let deg = f.degree().unwrap();
    let mut span = SparseSpan::default();
    for p in power_products(gens, i, f.field()) {
        let Some(dp) = p.degree() else { continue };
        if dp > deg {
            continue;
        }
        for m in monomials(vars, 0, deg - dp) {
            span.insert(sparse(&[p.mul_monomial(&m)]));
        }
    }
    span.contains(sparse(std::slice::from_ref(f)))
}

/// `dim_Q` of `Q[vars]^rank / (relations + a^{level+1})` for `a = (vars)`,
/// counted by elimination on truncated relation multiples.
pub fn level_dimension(relations: &[Vec<Polynomial>], rank: usize, vars: &[u32], level: u32) -> usize {
    let basis = monomials(vars, 0, level).len() * rank;
    let mut span = SparseSpan::default();
    for r in relations {
        for m in monomials(vars, 0, level) {
            let shifted: Vec<Polynomial> =
                r.iter().map(|p| p.mul_monomial(&m).filter_terms(|t| t.degree() <= level)).collect();
            span.insert(sparse(&shifted));
        }
    }
    basis - span.rank()
}

/// Coordinates of a vector in `F_p^{rank x monos}`.
pub fn encode_fp(v: &[Polynomial], monos: &[Monomial], p: u64) -> Vec<u64> {
    let mut out = vec![0; v.len() * monos.len()];
    for (k, poly) in v.iter().enumerate() {
        for (m, c) in poly.terms() {
            if let Some(j) = monos.iter().position(|x| x == m) {
                let r = match c {
                    Coeff::Fp { r, .. } => *r,
                    Coeff::Q(_) => panic!("prime field expected"),
                };
                out[k * monos.len() + j] = r % p;
            }
        }
    }
    out
}

pub fn decode_fp(x: &[u64], monos: &[Monomial], rank: usize, field: Field) -> Vec<Polynomial> {
    (0..rank)
        .map(|k| {
            Polynomial::from_terms(
                field,
                monos.iter().enumerate().map(|(j, m)| (m.clone(), field.from_i64(x[k * monos.len() + j] as i64))),
            )
        })
        .collect()
}

/// Every element of the `F_p`-span of `gens`, by closure under adding
/// multiples of each generator.
pub fn enumerate_span(gens: &[Vec<u64>], dim: usize, p: u64) -> HashSet<Vec<u64>> {
    let mut set: HashSet<Vec<u64>> = HashSet::from([vec![0; dim]]);
    for g in gens {
        let current: Vec<Vec<u64>> = set.iter().cloned().collect();
        for s in current {
            for c in 1..p {
                set.insert(s.iter().zip(g).map(|(a, b)| (a + c * b) % p).collect());
            }
        }
    }
    set
}

/// Every vector of `F_p^dim`.
pub fn all_vectors(dim: usize, p: u64) -> Vec<Vec<u64>> {
    (0..p.pow(dim as u32))
        .map(|mut n| {
            (0..dim)
                .map(|_| {
                    let d = n % p;
                    n /= p;
                    d
                })
                .collect()
        })
        .collect()
}

/// `v` vanishes in `Q[vars]^rank / (relations + a^{level+1})`.
pub fn zero_at_level(relations: &[Vec<Polynomial>], v: &[Polynomial], vars: &[u32], level: u32) -> bool {
    let cut = |p: &Polynomial| p.filter_terms(|t| t.degree() <= level);
    let mut span = SparseSpan::default();
    for r in relations {
        for m in monomials(vars, 0, level) {
            span.insert(sparse(&r.iter().map(|p| cut(&p.mul_monomial(&m))).collect::<Vec<_>>()));
        }
    }
    span.contains(sparse(&v.iter().map(cut).collect::<Vec<_>>()))
}

/// One membership comparison: `(engine, brute force)`.
pub type Verdicts = (bool, bool);

/// `f in a^i` for sampled homogeneous ideals in `Q[t1, t2, t3]` and
/// `deg f <= 6`, half of them built from products of generators.
pub fn groebner_cases(seeds: std::ops::Range<u64>) -> Vec<Verdicts> {
    use adic::{random, AdicIdeal};
    use rand::Rng;

    let vars = [1, 2, 3];
    let mut out = Vec::new();
    for k in seeds {
        let mut g = random::derive(0x9b, k);
        let ngens = g.gen_range(1..=2);
        let gens: Vec<Polynomial> = (0..ngens)
            .map(|_| {
                let d = g.gen_range(1..=2);
                random::homogeneous(&mut g, Field::Rational, &vars, d, 2)
            })
            .collect();
        let ideal = AdicIdeal::general(gens.clone(), 12).unwrap();
        for i in 1..=2 {
            let products = power_products(&gens, i, Field::Rational);
            for trial in 0..4 {
                let f = if trial % 2 == 0 {
                    products.iter().fold(Polynomial::zero(Field::Rational), |acc, p| {
                        let room = 6u32.saturating_sub(p.degree().unwrap());
                        &acc + &(p * &random::poly(&mut g, Field::Rational, &vars, room as usize, 2))
                    })
                } else {
                    random::poly(&mut g, Field::Rational, &vars, 6, 4)
                };
                if f.degree().unwrap_or(0) > 6 {
                    continue;
                }
                out.push((ideal.power_membership(&f, i).unwrap(), brute_power_membership(&f, &gens, i, &vars)));
            }
        }
    }
    out
}

/// `module_zero_test` on every vector of `M_level` for a sampled
/// presentation over `F_p`, against the enumerated relation span.
pub fn zero_test_cases(p: u64, seed: u64, vars: &[u32], level: usize, max_rank: usize) -> Vec<Verdicts> {
    use adic::{random, TruncatedElement};

    let field = Field::prime(p).unwrap();
    let mut g = random::derive(seed, 0);
    let m = random::presentation(&mut g, field, vars, max_rank, 2, 2);
    let monos = monomials(vars, 0, level as u32);
    let dim = m.rank() * monos.len();
    let mut gens = Vec::new();
    for r in m.relations() {
        for mu in &monos {
            let shifted: Vec<Polynomial> = r.iter().map(|x| x.mul_monomial(mu)).collect();
            gens.push(encode_fp(&shifted, &monos, p));
        }
    }
    let span = enumerate_span(&gens, dim, p);
    all_vectors(dim, p)
        .into_iter()
        .map(|x| {
            let v = TruncatedElement { level, coords: decode_fp(&x, &monos, m.rank(), field) };
            (m.module_zero_test(&v).unwrap(), span.contains(&x))
        })
        .collect()
}

/// The zero-test configurations exercised by the tests.
pub fn zero_test_suite() -> Vec<Verdicts> {
    (0..8)
        .flat_map(|seed| {
            [
                zero_test_cases(2, seed, &[1, 2], 1, 2),
                zero_test_cases(2, seed, &[1], 2, 2),
                zero_test_cases(3, seed, &[1, 2], 1, 1),
                zero_test_cases(3, seed, &[1], 1, 2),
            ]
            .concat()
        })
        .collect()
}
