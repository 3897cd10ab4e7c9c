//! Elements of the completion `M^ = lim M_i` as lazily evaluated coherent
//! towers of truncations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::ideal::{AdicIdeal, DyadicDistance, OrderValue, VariableSet};
use crate::linalg::Span;
use crate::poly::{Monomial, Polynomial};
use crate::truncate::{monomials_up_to, vec_add, vec_scale, vec_sub, LevelSpace, ModulePresentation, TruncatedElement};

/// Produces a representative (not necessarily reduced) of level `i`.
pub type LevelOracle = Arc<dyn Fn(usize) -> Result<Vec<Polynomial>> + Send + Sync>;

/// A completion element given by a level oracle.
///
/// Evaluated levels are memoized; each newly evaluated level is checked for
/// coherence against every level already in the memo. Clones share the memo.
#[derive(Clone)]
pub struct TowerElement {
    module: Arc<ModulePresentation>,
    oracle: LevelOracle,
    memo: Arc<Mutex<BTreeMap<usize, TruncatedElement>>>,
    // Set when the tower is the image of a module element.
    source: Option<Vec<Polynomial>>,
}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let memo = self.memo.lock().unwrap();
        f.debug_struct("TowerElement")
            .field("evaluated", &memo.keys().collect::<Vec<_>>())
            .field("source", &self.source)
            .finish()
    }
}

/// How upper bounds on the adic order of `M^` itself are certified when the
/// ideal is not finitely generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessStrategy {
    None,
    /// Kill `t1..tn` for every `n <= max_kill`: a surviving term refutes
    /// `x = sum_{k <= n} t_k * b_k`.
    SubstitutionKill {
        max_kill: usize,
    },
}

impl TowerElement {
    pub fn from_oracle(module: Arc<ModulePresentation>, oracle: LevelOracle) -> TowerElement {
        TowerElement { module, oracle, memo: Arc::new(Mutex::new(BTreeMap::new())), source: None }
    }

    /// `tau_M(m)`: the constant tower of truncations of `m`.
    pub fn from_element(m: Vec<Polynomial>, module: Arc<ModulePresentation>) -> Result<TowerElement> {
        module.check_rank(&m)?;
        if let AdicIdeal::General(g) = module.ideal() {
            // normal forms must stay within the Gröbner degree cap
            let d = m.iter().filter_map(Polynomial::degree).max().unwrap_or(0);
            if d > g.degree_cap() {
                return Err(Error::DegreeCapExceeded { degree: d, cap: g.degree_cap() });
            }
        }
        let rep = m.clone();
        let mut t = TowerElement::from_oracle(module, Arc::new(move |_| Ok(rep.clone())));
        t.source = Some(m);
        Ok(t)
    }

    pub fn zero(module: Arc<ModulePresentation>) -> TowerElement {
        let z = vec![Polynomial::zero(module.field()); module.rank()];
        TowerElement::from_element(z, module).expect("zero vector is valid")
    }

    pub fn module(&self) -> &Arc<ModulePresentation> {
        &self.module
    }

    pub fn source(&self) -> Option<&[Polynomial]> {
        self.source.as_deref()
    }

    pub fn evaluated_levels(&self) -> Vec<usize> {
        self.memo.lock().unwrap().keys().copied().collect()
    }

    /// `pi_{M,i}(x)`, after checking coherence with every evaluated level.
    pub fn project(&self, level: usize) -> Result<TruncatedElement> {
        if let Some(hit) = self.memo.lock().unwrap().get(&level) {
            return Ok(hit.clone());
        }
        let raw = (self.oracle)(level)?;
        let rep = self.module.truncate(&raw, level)?;
        let known: Vec<(usize, TruncatedElement)> =
            self.memo.lock().unwrap().iter().map(|(k, v)| (*k, v.clone())).collect();
        for (j, other) in known {
            let (lower, upper) = if j < level { (j, level) } else { (level, j) };
            let (low_rep, high_rep) = if j < level { (&other, &rep) } else { (&rep, &other) };
            let projected = self.module.project(high_rep, lower)?;
            if !self.module.equal_at(&projected, low_rep)? {
                return Err(Error::Coherence { lower, upper });
            }
        }
        self.memo.lock().unwrap().insert(level, rep.clone());
        Ok(rep)
    }

    fn same_module(&self, other: &TowerElement) -> Result<()> {
        if Arc::ptr_eq(&self.module, &other.module) || *self.module == *other.module {
            Ok(())
        } else {
            Err(Error::ModuleMismatch)
        }
    }

    pub fn add(&self, other: &TowerElement) -> Result<TowerElement> {
        self.same_module(other)?;
        let (a, b) = (self.clone(), other.clone());
        let mut out = TowerElement::from_oracle(
            self.module.clone(),
            Arc::new(move |i| Ok(vec_add(&a.project(i)?.coords, &b.project(i)?.coords))),
        );
        if let (Some(x), Some(y)) = (&self.source, &other.source) {
            out.source = Some(vec_add(x, y));
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TowerElement) -> Result<TowerElement> {
        self.same_module(other)?;
        let minus_one = Polynomial::from_i64(self.module.field(), -1);
        self.add(&other.scale(&minus_one))
    }

    /// Multiplication by a ring element.
    pub fn scale(&self, c: &Polynomial) -> TowerElement {
        let a = self.clone();
        let c2 = c.clone();
        let mut out = TowerElement::from_oracle(
            self.module.clone(),
            Arc::new(move |i| Ok(vec_scale(&c2, &a.project(i)?.coords))),
        );
        out.source = self.source.as_ref().map(|s| vec_scale(c, s));
        out
    }

    /// Multiplication by an element of the completed ring, given as a rank-one tower.
    pub fn scale_by_tower(&self, c: &TowerElement) -> Result<TowerElement> {
        if c.module.rank() != 1 || !c.module.is_free() || c.module.ideal() != self.module.ideal() {
            return Err(Error::ModuleMismatch);
        }
        let (a, s) = (self.clone(), c.clone());
        let mut out = TowerElement::from_oracle(
            self.module.clone(),
            Arc::new(move |i| {
                let scalar = s.project(i)?.coords[0].clone();
                Ok(vec_scale(&scalar, &a.project(i)?.coords))
            }),
        );
        if let (Some(x), Some(y)) = (&c.source, &self.source) {
            out.source = Some(vec_scale(&x[0], y));
        }
        Ok(out)
    }

    /// Whether `pi_i(x)` is zero in `M_i`.
    pub fn vanishes_at(&self, level: usize) -> Result<bool> {
        self.module.module_zero_test(&self.project(level)?)
    }

    /// `ord'(x)`: the least `j` with `pi_j(x) != 0`, exact up to `cap`.
    pub fn ord_prime(&self, cap: usize) -> Result<OrderValue> {
        for j in 0..=cap {
            if !self.vanishes_at(j)? {
                return Ok(OrderValue::Finite(j));
            }
        }
        Ok(OrderValue::AtLeast(cap + 1))
    }

    pub fn dist_prime(&self, other: &TowerElement, cap: usize) -> Result<DyadicDistance> {
        Ok(self.sub(other)?.ord_prime(cap)?.distance())
    }

    /// Checks the substitution-kill certificate: for every `n <= max_kill`,
    /// killing `t1..tn` in `pi_cap(x)` leaves a nonzero class. Returns the
    /// lowest surviving term for each `n`, or `None` if some kill empties it.
    pub fn substitution_kill(&self, cap: usize, max_kill: usize) -> Result<Option<Vec<Polynomial>>> {
        let rep = self.project(cap)?;
        let mut witnesses = Vec::new();
        for n in 0..=max_kill {
            let kill: BTreeSet<u32> = (1..=n as u32).collect();
            let killed: Vec<Polynomial> = rep.coords.iter().map(|p| p.substitute_zero(&kill)).collect();
            let killed_module = killed_presentation(&self.module, &kill)?;
            let t = TruncatedElement { level: cap, coords: killed.clone() };
            if killed_module.module_zero_test(&t)? {
                return Ok(None);
            }
            let lowest = killed
                .iter()
                .filter_map(|p| p.terms().next().map(|(m, c)| Polynomial::term(c.clone(), m.clone())))
                .min_by(|a, b| a.leading_term().unwrap().0.cmp(b.leading_term().unwrap().0))
                .expect("nonzero");
            witnesses.push(lowest);
        }
        Ok(Some(witnesses))
    }

    /// Bounds `(lower, upper)` on the adic order of `x` inside the module `M^`.
    ///
    /// For finitely generated ideals both bounds equal `ord'`. Otherwise the
    /// upper bound comes from `ord'` or a substitution-kill certificate and
    /// the lower bound from the source element, when known.
    pub fn ord_adic_bounds(&self, cap: usize, strategy: WitnessStrategy) -> Result<(OrderValue, OrderValue)> {
        let ord_p = self.ord_prime(cap)?;
        if self.module.is_finitely_generated_ideal() {
            return Ok((ord_p, ord_p));
        }
        let lower = match &self.source {
            Some(m) => Some(self.module.ord_module(m, cap)?),
            None => None,
        };
        let killed = match strategy {
            WitnessStrategy::SubstitutionKill { max_kill } => self.substitution_kill(cap, max_kill)?.is_some(),
            WitnessStrategy::None => false,
        };
        let upper = if killed { OrderValue::Finite(0) } else { ord_p };
        match lower {
            Some(l) => Ok((l, upper)),
            None if killed || strategy != WitnessStrategy::None => Ok((OrderValue::Finite(0), upper)),
            None => Err(Error::NoWitness("ideal is not finitely generated; pass a substitution-kill strategy".into())),
        }
    }
}

/// The presentation with `t_k` (k in `kill`) set to zero in every relation.
fn killed_presentation(m: &ModulePresentation, kill: &BTreeSet<u32>) -> Result<ModulePresentation> {
    if m.is_free() {
        return Ok(m.clone());
    }
    let rels = m.relations().iter().map(|r| r.iter().map(|p| p.substitute_zero(kill)).collect()).collect();
    ModulePresentation::new(m.field(), m.ideal().clone(), m.rank(), rels)
}

/// Outcome of the finite-level completeness criterion at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem6Report {
    pub level: usize,
    /// Deepest truncation inspected.
    pub depth: usize,
    pub surjective_tau: bool,
    pub kernel_equals_power: bool,
    /// `tau_{M,i}` is bijective (it is always split injective).
    pub tau_bijective: bool,
    pub witness: Option<String>,
}

impl Theorem6Report {
    pub fn passed(&self) -> bool {
        self.surjective_tau && self.kernel_equals_power && self.tau_bijective
    }
}

/// Checks, at level `i`, that `tau_{M,i}: M_i -> A_i ⊗ M^` is surjective and
/// that `Ker(pi_{M,i}) = a^{i+1} M^`, by exact linear algebra on the
/// truncations `M_D` for `D = i+1 ..= i+1+extra`.
///
/// `a^{i+1}` is generated by the finitely many monomials of degree `i+1` in
/// the ideal variables; both conditions say that these generators together
/// with the lifts of `M_i` span every `M_D`, with the kernel of `M_D -> M_i`
/// exactly their span.
pub fn theorem6_check(m: &ModulePresentation, level: usize, extra: usize) -> Result<Theorem6Report> {
    let vars: Vec<u32> = match m.ideal() {
        AdicIdeal::Variables(VariableSet::Finite(s)) => s.iter().copied().collect(),
        AdicIdeal::Variables(VariableSet::All) => {
            return Err(Error::Precondition(
                "infinitely many ideal variables: tau_{M,i} is refuted by witnesses (see the gallery), not by linear algebra".into(),
            ))
        }
        AdicIdeal::General(_) => {
            return Err(Error::Unsupported("the completeness criterion needs a variable ideal".into()))
        }
    };
    let field = m.field();
    let rank = m.rank();
    let power_gens = monomials_up_to(&vars, level + 1, level + 1);
    let mut report = Theorem6Report {
        level,
        depth: level + 1 + extra,
        surjective_tau: true,
        kernel_equals_power: true,
        tau_bijective: true,
        witness: None,
    };
    for depth in level + 1..=level + 1 + extra {
        let space = LevelSpace::new(field, vars.clone(), depth, rank);
        let mut relations = Span::new(field, space.dim());
        for mu in monomials_up_to(&vars, 0, depth) {
            for r in m.relations() {
                let shifted: Vec<Polynomial> = r.iter().map(|p| p.mul_monomial(&mu)).collect();
                relations.insert(&space.encode(&shifted));
            }
        }
        // a^{i+1} M_D + relations
        let mut power = relations.clone();
        for g in &power_gens {
            for nu in monomials_up_to(&vars, 0, depth - level - 1) {
                let mono = g.mul(&nu);
                for k in 0..rank {
                    power.insert(&space.encode(&unit(field, rank, k, &mono)));
                }
            }
        }
        // Ker(M_D -> M_i): every monomial of degree > i, plus relations.
        let mut kernel = relations.clone();
        for mono in monomials_up_to(&vars, level + 1, depth) {
            for k in 0..rank {
                kernel.insert(&space.encode(&unit(field, rank, k, &mono)));
            }
        }
        // Lifts of M_i plus a^{i+1} M_D must exhaust M_D.
        let mut image = power.clone();
        for mono in monomials_up_to(&vars, 0, level) {
            for k in 0..rank {
                image.insert(&space.encode(&unit(field, rank, k, &mono)));
            }
        }
        if image.rank() != space.dim() {
            report.surjective_tau = false;
            report.witness.get_or_insert_with(|| {
                let missing = first_missing(&image, &space);
                format!("depth {depth}: class of {missing} not reached")
            });
        }
        if power.rank() != kernel.rank() {
            report.kernel_equals_power = false;
            report.witness.get_or_insert_with(|| {
                let missing = first_missing(&power, &space);
                format!("depth {depth}: {missing} in Ker(pi_{level}) but not in a^{} M", level + 1)
            });
        }
        // dim N_i as modelled at depth D against dim M_i.
        let dim_mi = m.level_dimension(level, &vars);
        if space.dim() - power.rank() != dim_mi {
            report.tau_bijective = false;
            report.witness.get_or_insert_with(|| format!("depth {depth}: dim N_{level} != dim M_{level} = {dim_mi}"));
        }
    }
    Ok(report)
}

fn unit(field: crate::field::Field, rank: usize, k: usize, m: &Monomial) -> Vec<Polynomial> {
    let mut v = vec![Polynomial::zero(field); rank];
    v[k] = Polynomial::monomial(field, m.clone());
    v
}

fn first_missing(span: &Span, space: &LevelSpace) -> String {
    let field = span.field();
    for idx in 0..space.dim() {
        let mut e = crate::linalg::zero_vector(field, space.dim());
        e[idx] = field.one();
        if !span.contains(&e) {
            return crate::poly::fmt_vector(&space.decode(&e));
        }
    }
    "?".into()
}

/// Checks at levels `<= cap` that `x` and `y` agree: used for tower identities.
pub fn towers_agree(x: &TowerElement, y: &TowerElement, cap: usize) -> Result<bool> {
    let d = x.sub(y)?;
    for i in 0..=cap {
        if !d.vanishes_at(i)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Difference of two truncations, for callers comparing levels directly.
pub fn level_difference(a: &TruncatedElement, b: &TruncatedElement) -> Vec<Polynomial> {
    vec_sub(&a.coords, &b.coords)
}
