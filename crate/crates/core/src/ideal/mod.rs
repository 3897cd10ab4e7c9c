//! The ideal `a`: membership in its powers, normal forms modulo `a^{i+1}`,
//! and the adic order and metric on the polynomial ring.

mod groebner;
mod order;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{parse_poly, Monomial, Polynomial};

pub use groebner::{groebner_basis, reduce};
pub use order::{DyadicDistance, OrderValue};

/// Degree cap used when an ideal spec does not name one.
pub const DEFAULT_GROEBNER_CAP: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VariableSet {
    Finite(BTreeSet<u32>),
    /// Every variable `t1, t2, ...`.
    All,
}

impl VariableSet {
    pub fn contains(&self, v: u32) -> bool {
        match self {
            VariableSet::Finite(s) => s.contains(&v),
            VariableSet::All => true,
        }
    }
}

type PowerCache = Arc<Mutex<HashMap<usize, Arc<Result<Vec<Polynomial>>>>>>;

/// An ideal given by polynomial generators, with a degree cap bounding the
/// Gröbner computations behind membership tests.
#[derive(Clone)]
pub struct GeneralIdeal {
    gens: Vec<Polynomial>,
    field: Field,
    degree_cap: u32,
    // Bases of a^k keyed by k; recomputation is idempotent.
    cache: PowerCache,
}

impl fmt::Debug for GeneralIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralIdeal").field("gens", &self.gens).field("degree_cap", &self.degree_cap).finish()
    }
}

impl PartialEq for GeneralIdeal {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens && self.degree_cap == other.degree_cap
    }
}

impl Eq for GeneralIdeal {}

impl GeneralIdeal {
    pub fn generators(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Generators of `a^k`: all products of `k` generators.
    fn power_generators(&self, k: usize) -> Vec<Polynomial> {
        let mut layer = vec![(0usize, Polynomial::one(self.field))];
        for _ in 0..k {
            let mut next = Vec::new();
            for (start, p) in &layer {
                for (j, g) in self.gens.iter().enumerate().skip(*start) {
                    next.push((j, p * g));
                }
            }
            layer = next;
        }
        layer.into_iter().map(|(_, p)| p).collect()
    }

    pub fn power_basis(&self, k: usize) -> Result<Vec<Polynomial>> {
        if let Some(hit) = self.cache.lock().unwrap().get(&k) {
            return (**hit).clone();
        }
        let computed = groebner_basis(&self.power_generators(k), self.degree_cap);
        self.cache.lock().unwrap().insert(k, Arc::new(computed.clone()));
        computed
    }

    fn check_degree(&self, f: &Polynomial) -> Result<()> {
        let d = f.degree().unwrap_or(0);
        if d > self.degree_cap {
            return Err(Error::DegreeCapExceeded { degree: d, cap: self.degree_cap });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdicIdeal {
    Variables(VariableSet),
    General(GeneralIdeal),
}

impl AdicIdeal {
    pub fn vars<I: IntoIterator<Item = u32>>(vars: I) -> AdicIdeal {
        let set: BTreeSet<u32> = vars.into_iter().collect();
        assert!(!set.is_empty(), "variable ideal needs at least one variable");
        assert!(!set.contains(&0), "variable indices start at 1");
        AdicIdeal::Variables(VariableSet::Finite(set))
    }

    pub fn all_variables() -> AdicIdeal {
        AdicIdeal::Variables(VariableSet::All)
    }

    pub fn general(gens: Vec<Polynomial>, degree_cap: u32) -> Result<AdicIdeal> {
        if gens.is_empty() {
            return Err(Error::Precondition("ideal needs at least one generator".into()));
        }
        if gens.iter().any(Polynomial::is_zero) {
            return Err(Error::Precondition("ideal generators must be nonzero".into()));
        }
        if degree_cap < 1 {
            return Err(Error::Precondition("degree cap must be at least 1".into()));
        }
        let field = gens[0].field();
        if let Some(g) = gens.iter().find(|g| g.field() != field) {
            return Err(Error::DomainMismatch(field.to_string(), g.field().to_string()));
        }
        Ok(AdicIdeal::General(GeneralIdeal { gens, field, degree_cap, cache: Arc::new(Mutex::new(HashMap::new())) }))
    }

    /// Parses `vars t1 t2`, `vars *`, or `gens <poly>; <poly>; ...`.
    pub fn parse(spec: &str, field: Field) -> Result<AdicIdeal> {
        let spec = spec.trim();
        let bad = |msg: &str| Error::Format { line: 0, message: format!("ideal spec: {msg}") };
        if let Some(rest) = spec.strip_prefix("vars") {
            let rest = rest.trim();
            if rest == "*" {
                return Ok(AdicIdeal::all_variables());
            }
            let mut vars = BTreeSet::new();
            for tok in rest.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
                let idx = tok
                    .strip_prefix('t')
                    .and_then(|n| if n.is_empty() { Some(1) } else { n.parse::<u32>().ok() })
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| bad(&format!("bad variable '{tok}'")))?;
                vars.insert(idx);
            }
            if vars.is_empty() {
                return Err(bad("no variables"));
            }
            return Ok(AdicIdeal::Variables(VariableSet::Finite(vars)));
        }
        if let Some(rest) = spec.strip_prefix("gens") {
            let gens = rest
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| parse_poly(s, field))
                .collect::<Result<Vec<_>>>()?;
            return AdicIdeal::general(gens, DEFAULT_GROEBNER_CAP);
        }
        Err(bad("expected 'vars ...' or 'gens ...'"))
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, AdicIdeal::Variables(_))
    }

    pub fn is_all_variables(&self) -> bool {
        matches!(self, AdicIdeal::Variables(VariableSet::All))
    }

    pub fn variable_set(&self) -> Option<&VariableSet> {
        match self {
            AdicIdeal::Variables(s) => Some(s),
            AdicIdeal::General(_) => None,
        }
    }

    /// True when `v` is one of the generating variables of a variable ideal.
    pub fn contains_variable(&self, v: u32) -> bool {
        match self {
            AdicIdeal::Variables(s) => s.contains(v),
            AdicIdeal::General(_) => false,
        }
    }

    /// Degree of a monomial counted in the ideal's variables (variable ideals only).
    pub fn a_degree(&self, m: &Monomial) -> u32 {
        match self {
            AdicIdeal::Variables(s) => m.degree_in(|v| s.contains(v)),
            AdicIdeal::General(_) => panic!("a_degree is defined for variable ideals only"),
        }
    }

    /// Decides `f ∈ a^i`.
    pub fn power_membership(&self, f: &Polynomial, i: usize) -> Result<bool> {
        if f.is_zero() || i == 0 {
            return Ok(true);
        }
        match self {
            AdicIdeal::Variables(_) => Ok(f.terms().all(|(m, _)| self.a_degree(m) as usize >= i)),
            AdicIdeal::General(g) => {
                g.check_degree(f)?;
                Ok(reduce(f, &g.power_basis(i)?).is_zero())
            }
        }
    }

    /// Canonical representative of `f` modulo `a^{i+1}`.
    pub fn normal_form(&self, f: &Polynomial, i: usize) -> Result<Polynomial> {
        match self {
            AdicIdeal::Variables(_) => Ok(f.filter_terms(|m| (self.a_degree(m) as usize) <= i)),
            AdicIdeal::General(g) => {
                g.check_degree(f)?;
                Ok(reduce(f, &g.power_basis(i + 1)?))
            }
        }
    }

    /// The adic order `sup { i : f ∈ a^i }`, exact for variable ideals and
    /// exact up to `cap` for general ideals.
    pub fn ord_ring(&self, f: &Polynomial, cap: usize) -> OrderValue {
        if f.is_zero() {
            return OrderValue::Infinity;
        }
        match self {
            AdicIdeal::Variables(_) => {
                OrderValue::Finite(f.terms().map(|(m, _)| self.a_degree(m) as usize).min().unwrap())
            }
            AdicIdeal::General(_) => {
                for i in 1..=cap + 1 {
                    match self.power_membership(f, i) {
                        Ok(true) => continue,
                        Ok(false) => return OrderValue::Finite(i - 1),
                        Err(_) => return OrderValue::AtLeast(i - 1),
                    }
                }
                OrderValue::AtLeast(cap + 1)
            }
        }
    }

    pub fn dist_ring(&self, f: &Polynomial, g: &Polynomial, cap: usize) -> Result<DyadicDistance> {
        Ok(self.ord_ring(&f.checked_sub(g)?, cap).distance())
    }
}

impl fmt::Display for AdicIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdicIdeal::Variables(VariableSet::All) => write!(f, "vars *"),
            AdicIdeal::Variables(VariableSet::Finite(s)) => {
                write!(f, "vars")?;
                for v in s {
                    write!(f, " t{v}")?;
                }
                Ok(())
            }
            AdicIdeal::General(g) => {
                let parts: Vec<String> = g.gens.iter().map(|p| p.to_string()).collect();
                write!(f, "gens {}", parts.join("; "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Polynomial {
        parse_poly(s, Field::Rational).unwrap()
    }

    #[test]
    fn membership_examples() {
        let a = AdicIdeal::vars([1, 2]);
        assert!(a.power_membership(&q("t1*t2"), 2).unwrap());
        assert!(!a.power_membership(&q("t1"), 2).unwrap());
        let g = AdicIdeal::general(vec![q("t1^2 - t1^3")], 12).unwrap();
        assert!(!g.power_membership(&q("t1^2"), 1).unwrap());
        assert!(g.power_membership(&q("t1^2 - t1^3"), 1).unwrap());
        assert!(g.power_membership(&(&q("t1^2 - t1^3") * &q("1 + t1")), 1).unwrap());
    }

    #[test]
    fn normal_form_examples() {
        let a = AdicIdeal::vars([1]);
        assert_eq!(a.normal_form(&q("1 + t1^3"), 1).unwrap(), q("1"));
        assert!(a.normal_form(&q("t1^2 + t1^5"), 1).unwrap().is_zero());
    }

    #[test]
    fn order_examples() {
        let t = AdicIdeal::vars([1]);
        assert_eq!(t.ord_ring(&q("t1^3"), 8), OrderValue::Finite(3));
        assert_eq!(t.ord_ring(&q("0"), 8), OrderValue::Infinity);
        let all = AdicIdeal::all_variables();
        assert_eq!(all.ord_ring(&q("t1 + t2^2"), 8), OrderValue::Finite(1));
        // A finite variable set ignores other variables.
        assert_eq!(t.ord_ring(&q("t2^5"), 8), OrderValue::Finite(0));
    }

    #[test]
    fn distance_examples() {
        let t = AdicIdeal::vars([1]);
        let f = q("t1 + 3");
        assert_eq!(t.dist_ring(&f, &f, 8).unwrap(), DyadicDistance::Zero);
        assert_eq!(t.dist_ring(&q("1 + t1"), &q("1"), 8).unwrap(), DyadicDistance::Pow(1));
        assert_eq!(t.dist_ring(&q("t1"), &q("t1^2"), 8).unwrap(), DyadicDistance::Pow(1));
    }

    #[test]
    fn general_order_is_exact_up_to_cap() {
        let g = AdicIdeal::general(vec![q("t1^2 - t1^3")], 30).unwrap();
        let f = q("t1^2 - t1^3").pow(2);
        assert_eq!(g.ord_ring(&f, 4), OrderValue::Finite(2));
        assert_eq!(g.ord_ring(&f, 1), OrderValue::AtLeast(2));
    }

    #[test]
    fn degree_cap_exceeded() {
        let g = AdicIdeal::general(vec![q("t1^2")], 3).unwrap();
        assert!(matches!(g.power_membership(&q("t1^5"), 1), Err(Error::DegreeCapExceeded { degree: 5, cap: 3 })));
    }

    #[test]
    fn spec_syntax() {
        assert_eq!(AdicIdeal::parse("vars t1 t3", Field::Rational).unwrap(), AdicIdeal::vars([1, 3]));
        assert!(AdicIdeal::parse("vars *", Field::Rational).unwrap().is_all_variables());
        let g = AdicIdeal::parse("gens t1^2 - t2; t2^2", Field::Rational).unwrap();
        assert_eq!(g.to_string(), "gens t1^2 - t2; t2^2");
        assert!(AdicIdeal::parse("vars", Field::Rational).is_err());
        assert!(AdicIdeal::parse("frob", Field::Rational).is_err());
    }
}
