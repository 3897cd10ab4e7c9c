//! Sparse multivariate polynomials over `Q` or `F_p` in the variables
//! `t1, t2, t3, ...` (no upper bound on the index).

mod parse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Coeff, Field};

pub(crate) use parse::coefficient;
pub use parse::{parse_poly, Parser};

/// A power product `t_{v1}^{e1} * t_{v2}^{e2} * ...`.
///
/// Stored as `(variable, exponent)` pairs with strictly ascending variable
/// indices and positive exponents; the empty list is the monomial `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(index: u32) -> Monomial {
        Self::var_pow(index, 1)
    }

    pub fn var_pow(index: u32, exp: u32) -> Monomial {
        assert!(index >= 1, "variable indices start at 1");
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(index, exp)])
        }
    }

    /// Builds a monomial from arbitrary pairs, merging repeats and dropping
    /// zero exponents.
    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Monomial {
        let mut acc: BTreeMap<u32, u32> = BTreeMap::new();
        for (v, e) in pairs {
            assert!(v >= 1, "variable indices start at 1");
            *acc.entry(v).or_insert(0) += e;
        }
        Monomial(acc.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, var: u32) -> u32 {
        self.0.binary_search_by_key(&var, |&(v, _)| v).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn variables(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    /// Total degree counted only over variables accepted by `in_ideal`.
    pub fn degree_in(&self, mut in_ideal: impl FnMut(u32) -> bool) -> u32 {
        self.0.iter().filter(|&&(v, _)| in_ideal(v)).map(|&(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => {
                        out.push((va, ea));
                        i += 1;
                    }
                    Ordering::Greater => {
                        out.push((vb, eb));
                        j += 1;
                    }
                    Ordering::Equal => {
                        out.push((va, ea + eb));
                        i += 1;
                        j += 1;
                    }
                },
                (Some(&p), None) => {
                    out.push(p);
                    i += 1;
                }
                (None, Some(&p)) => {
                    out.push(p);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial(out)
    }

    pub fn pow(&self, n: u32) -> Monomial {
        if n == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, e)| (v, e * n)).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|&(v, e)| other.exponent(v) >= e)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial::from_pairs(other.0.iter().map(|&(v, e)| (v, e - self.exponent(v)))))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let vars: BTreeSet<u32> = self.variables().chain(other.variables()).collect();
        Monomial::from_pairs(vars.into_iter().map(|v| (v, self.exponent(v).max(other.exponent(v)))))
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.variables().all(|v| other.exponent(v) == 0)
    }

    pub fn involves_any(&self, vars: &BTreeSet<u32>) -> bool {
        self.variables().any(|v| vars.contains(&v))
    }

    /// Splits into the part over variables accepted by `keep` and the rest.
    pub fn split(&self, mut keep: impl FnMut(u32) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().partition(|&&(v, _)| keep(v));
        (Monomial(a), Monomial(b))
    }
}

/// Graded-lex: total degree first, then the exponent of the lowest-indexed
/// variable where the two differ.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| lex_cmp(&self.0, &other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn lex_cmp(a: &[(u32, u32)], b: &[(u32, u32)]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(&(va, ea)), Some(&(vb, eb))) => {
                if va < vb {
                    return Ordering::Greater;
                }
                if va > vb {
                    return Ordering::Less;
                }
                if ea != eb {
                    return ea.cmp(&eb);
                }
                i += 1;
                j += 1;
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, &(v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "t{v}")?;
            } else {
                write!(f, "t{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// An exact polynomial in canonical form: no zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    field: Field,
    terms: BTreeMap<Monomial, Coeff>,
}

impl Polynomial {
    pub fn zero(field: Field) -> Polynomial {
        Polynomial { field, terms: BTreeMap::new() }
    }

    pub fn one(field: Field) -> Polynomial {
        Polynomial::constant(field.one())
    }

    pub fn constant(c: Coeff) -> Polynomial {
        Polynomial::term(c, Monomial::one())
    }

    pub fn from_i64(field: Field, n: i64) -> Polynomial {
        Polynomial::constant(field.from_i64(n))
    }

    pub fn var(field: Field, index: u32) -> Polynomial {
        Polynomial::term(field.one(), Monomial::var(index))
    }

    pub fn monomial(field: Field, m: Monomial) -> Polynomial {
        Polynomial::term(field.one(), m)
    }

    pub fn term(c: Coeff, m: Monomial) -> Polynomial {
        let field = c.field();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { field, terms }
    }

    /// Collects terms, summing repeated monomials.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coeff)>>(field: Field, it: I) -> Polynomial {
        let mut p = Polynomial::zero(field);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> Coeff {
        self.coeff(&Monomial::one())
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    pub fn variables(&self) -> BTreeSet<u32> {
        self.terms.keys().flat_map(|m| m.variables()).collect()
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        assert!(self.field.contains(&c), "coefficient field mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = &*existing + &c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_domain(&self, other: &Polynomial) -> Result<()> {
        if self.field != other.field {
            return Err(Error::DomainMismatch(self.field.to_string(), other.field.to_string()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_domain(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_domain(other)?;
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_domain(other)?;
        let mut out = Polynomial::zero(self.field);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.field);
        }
        Polynomial { field: self.field, terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial { field: self.field, terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.clone())).collect() }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.field);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Keeps only the terms whose monomial satisfies `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Polynomial {
        Polynomial {
            field: self.field,
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Sets every variable in `kill` to zero.
    pub fn substitute_zero(&self, kill: &BTreeSet<u32>) -> Polynomial {
        self.filter_terms(|m| !m.involves_any(kill))
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial domain mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial domain mismatch")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial domain mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { field: self.field, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

/// Canonical printing: descending monomial order, explicit `*` and `^`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Formats a coordinate vector as `(p1, p2, ...)`.
pub fn fmt_vector(v: &[Polynomial]) -> String {
    let parts: Vec<String> = v.iter().map(|p| p.to_string()).collect();
    format!("({})", parts.join(", "))
}
