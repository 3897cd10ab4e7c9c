//! Finitely presented modules and their truncations `M_i = M / a^{i+1} M`.
//!
//! A class in `M_i` is expanded on the monomial basis of degree `<= i` in the
//! finitely many ideal variables involved, so every question about `M_i`
//! becomes exact Gaussian elimination over the base field.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::ideal::{AdicIdeal, OrderValue};
use crate::linalg::{self, Span, Vector};
use crate::poly::{fmt_vector, parse_poly, Monomial, Polynomial};

/// Monomials in `vars` with total degree in `[min, max]`, ascending.
pub fn monomials_up_to(vars: &[u32], min: usize, max: usize) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut layer = vec![(0usize, Monomial::one())];
    for _ in 0..max {
        let mut next = Vec::new();
        for (start, m) in &layer {
            for (k, &v) in vars.iter().enumerate().skip(*start) {
                next.push((k, m.mul(&Monomial::var(v))));
            }
        }
        out.extend(next.iter().map(|(_, m)| m.clone()));
        layer = next;
    }
    out.retain(|m| m.degree() as usize >= min);
    out.sort();
    out
}

/// Coordinates of `A_i^rank` restricted to a finite variable set.
#[derive(Clone, Debug)]
pub struct LevelSpace {
    field: Field,
    vars: Vec<u32>,
    level: usize,
    rank: usize,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl LevelSpace {
    pub fn new(field: Field, vars: Vec<u32>, level: usize, rank: usize) -> LevelSpace {
        let monomials = monomials_up_to(&vars, 0, level);
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        LevelSpace { field, vars, level, rank, monomials, index }
    }

    pub fn dim(&self) -> usize {
        self.rank * self.monomials.len()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vars(&self) -> &[u32] {
        &self.vars
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Encodes a coordinate vector, dropping terms above the level.
    /// Every variable must belong to the space.
    pub fn encode(&self, coords: &[Polynomial]) -> Vector {
        let nm = self.monomials.len();
        let mut v = linalg::zero_vector(self.field, self.dim());
        for (k, p) in coords.iter().enumerate() {
            for (m, c) in p.terms() {
                if m.degree() as usize > self.level {
                    continue;
                }
                let idx = *self.index.get(m).expect("monomial in the level space");
                v[k * nm + idx] = c.clone();
            }
        }
        v
    }

    pub fn decode(&self, v: &[crate::field::Coeff]) -> Vec<Polynomial> {
        let nm = self.monomials.len();
        (0..self.rank)
            .map(|k| {
                Polynomial::from_terms(self.field, (0..nm).map(|j| (self.monomials[j].clone(), v[k * nm + j].clone())))
            })
            .collect()
    }
}

/// Relation span of a presentation at one level over one variable set.
struct LevelData {
    space: LevelSpace,
    relations: Span,
    relation_vectors: Vec<Vector>,
}

type LevelCache = Arc<Mutex<HashMap<(usize, Vec<u32>), Arc<LevelData>>>>;

/// Level data, coefficient monomials, columns and right-hand side.
type LinearSystem = (Arc<LevelData>, Vec<Monomial>, Vec<Vector>, Vector);

/// A finitely presented `A`-module: `rank` generators modulo the
/// submodule spanned by `relations`, with the adic ideal it is truncated by.
#[derive(Clone)]
pub struct ModulePresentation {
    field: Field,
    ideal: AdicIdeal,
    rank: usize,
    relations: Vec<Vec<Polynomial>>,
    cache: LevelCache,
}

impl fmt::Debug for ModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModulePresentation")
            .field("field", &self.field)
            .field("ideal", &self.ideal)
            .field("rank", &self.rank)
            .field("relations", &self.relations)
            .finish()
    }
}

impl PartialEq for ModulePresentation {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.ideal == other.ideal
            && self.rank == other.rank
            && self.relations == other.relations
    }
}

/// An element of `M_i`, stored as coordinate normal forms modulo `a^{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedElement {
    pub level: usize,
    pub coords: Vec<Polynomial>,
}

impl TruncatedElement {
    pub fn is_zero_vector(&self) -> bool {
        self.coords.iter().all(Polynomial::is_zero)
    }
}

impl fmt::Display for TruncatedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            write!(f, "{}", self.coords[0])
        } else {
            write!(f, "{}", fmt_vector(&self.coords))
        }
    }
}

/// Particular solution plus a basis of the homogeneous solutions.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub particular: Vec<Polynomial>,
    pub kernel: Vec<Vec<Polynomial>>,
}

pub fn vec_add(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(c: &Polynomial, a: &[Polynomial]) -> Vec<Polynomial> {
    a.iter().map(|x| c * x).collect()
}

pub fn zero_vec(field: Field, rank: usize) -> Vec<Polynomial> {
    vec![Polynomial::zero(field); rank]
}

impl ModulePresentation {
    pub fn free(field: Field, ideal: AdicIdeal, rank: usize) -> ModulePresentation {
        ModulePresentation { field, ideal, rank, relations: Vec::new(), cache: Arc::new(Mutex::new(HashMap::new())) }
    }

    /// The ring itself, as the free module of rank one.
    pub fn ring(field: Field, ideal: AdicIdeal) -> ModulePresentation {
        Self::free(field, ideal, 1)
    }

    pub fn new(
        field: Field,
        ideal: AdicIdeal,
        rank: usize,
        relations: Vec<Vec<Polynomial>>,
    ) -> Result<ModulePresentation> {
        for (j, r) in relations.iter().enumerate() {
            if r.len() != rank {
                return Err(Error::Precondition(format!("relation {j} has {} entries, expected {rank}", r.len())));
            }
            if let Some(p) = r.iter().find(|p| p.field() != field) {
                return Err(Error::DomainMismatch(field.to_string(), p.field().to_string()));
            }
        }
        let relations: Vec<Vec<Polynomial>> =
            relations.into_iter().filter(|r| r.iter().any(|p| !p.is_zero())).collect();
        let m = ModulePresentation { field, ideal, rank, relations, cache: Arc::new(Mutex::new(HashMap::new())) };
        m.check_supported()?;
        Ok(m)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ideal(&self) -> &AdicIdeal {
        &self.ideal
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn relations(&self) -> &[Vec<Polynomial>] {
        &self.relations
    }

    pub fn is_free(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn relation_variables(&self) -> BTreeSet<u32> {
        self.relations.iter().flatten().flat_map(|p| p.variables()).collect()
    }

    /// True when every module question reduces to finitely many variables:
    /// the ideal is finitely generated.
    pub fn is_finitely_generated_ideal(&self) -> bool {
        !self.ideal.is_all_variables()
    }

    fn check_supported(&self) -> Result<()> {
        if self.is_free() {
            return Ok(());
        }
        match &self.ideal {
            AdicIdeal::General(_) => {
                Err(Error::Unsupported("general ideals are supported on free modules only".into()))
            }
            AdicIdeal::Variables(_) => {
                if let Some(v) = self.relation_variables().into_iter().find(|&v| !self.ideal.contains_variable(v)) {
                    return Err(Error::Unsupported(format!("relation variable t{v} is not an ideal variable")));
                }
                Ok(())
            }
        }
    }

    pub fn check_rank(&self, coords: &[Polynomial]) -> Result<()> {
        if coords.len() != self.rank {
            return Err(Error::Precondition(format!(
                "vector has {} entries, module rank is {}",
                coords.len(),
                self.rank
            )));
        }
        if let Some(p) = coords.iter().find(|p| p.field() != self.field) {
            return Err(Error::DomainMismatch(self.field.to_string(), p.field().to_string()));
        }
        Ok(())
    }

    /// Image of `m` in `M_i`: coordinatewise normal forms.
    pub fn truncate(&self, m: &[Polynomial], level: usize) -> Result<TruncatedElement> {
        self.check_rank(m)?;
        let coords = m.iter().map(|p| self.ideal.normal_form(p, level)).collect::<Result<Vec<_>>>()?;
        Ok(TruncatedElement { level, coords })
    }

    /// Image of a level-`j` element at level `i <= j`.
    pub fn project(&self, v: &TruncatedElement, level: usize) -> Result<TruncatedElement> {
        if level > v.level {
            return Err(Error::LevelMismatch(v.level, level));
        }
        self.truncate(&v.coords, level)
    }

    pub fn zero(&self, level: usize) -> TruncatedElement {
        TruncatedElement { level, coords: zero_vec(self.field, self.rank) }
    }

    /// `e_k` at the given level.
    pub fn generator(&self, k: usize, level: usize) -> TruncatedElement {
        let mut coords = zero_vec(self.field, self.rank);
        coords[k] = Polynomial::one(self.field);
        TruncatedElement { level, coords }
    }

    fn level_data(&self, level: usize, vars: Vec<u32>) -> Arc<LevelData> {
        let key = (level, vars.clone());
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let space = LevelSpace::new(self.field, vars, level, self.rank);
        let mut relations = Span::new(self.field, space.dim());
        let mut relation_vectors = Vec::new();
        for mu in monomials_up_to(space.vars(), 0, level) {
            for r in &self.relations {
                let shifted: Vec<Polynomial> = r.iter().map(|p| p.mul_monomial(&mu)).collect();
                let v = space.encode(&shifted);
                if relations.insert(&v) {
                    relation_vectors.push(v);
                }
            }
        }
        let data = Arc::new(LevelData { space, relations, relation_vectors });
        self.cache.lock().unwrap().insert(key, data.clone());
        data
    }

    /// Ideal variables that matter for the given coordinate vectors.
    fn involved_vars<'a, I>(&self, vectors: I) -> Vec<u32>
    where
        I: IntoIterator<Item = &'a [Polynomial]>,
    {
        let mut vars = self.relation_variables();
        for v in vectors {
            for p in v {
                vars.extend(p.variables().into_iter().filter(|&x| self.ideal.contains_variable(x)));
            }
        }
        vars.into_iter().collect()
    }

    /// Splits coordinates by their monomial in non-ideal variables.
    fn outside_components(&self, coords: &[Polynomial]) -> BTreeMap<Monomial, Vec<Polynomial>> {
        let mut out: BTreeMap<Monomial, Vec<Polynomial>> = BTreeMap::new();
        for (k, p) in coords.iter().enumerate() {
            for (m, c) in p.terms() {
                let (inside, outside) = m.split(|v| self.ideal.contains_variable(v));
                let entry = out.entry(outside).or_insert_with(|| zero_vec(self.field, self.rank));
                entry[k].add_term(inside, c.clone());
            }
        }
        out
    }

    /// Decides whether `v` is zero in `M_i`, i.e. lies in the relation
    /// submodule plus `a^{i+1} A^rank`.
    pub fn module_zero_test(&self, v: &TruncatedElement) -> Result<bool> {
        self.check_rank(&v.coords)?;
        let level = v.level;
        if self.is_free() {
            for p in &v.coords {
                if !self.ideal.normal_form(p, level)?.is_zero() {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        for (_, comp) in self.outside_components(&v.coords) {
            let vars = self.involved_vars([comp.as_slice()]);
            let data = self.level_data(level, vars);
            if !data.relations.contains(&data.space.encode(&comp)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equality in `M_i`, decided through the difference.
    pub fn equal_at(&self, a: &TruncatedElement, b: &TruncatedElement) -> Result<bool> {
        if a.level != b.level {
            return Err(Error::LevelMismatch(a.level, b.level));
        }
        self.module_zero_test(&TruncatedElement { level: a.level, coords: vec_sub(&a.coords, &b.coords) })
    }

    fn require_solvable(&self, vectors: &[&[Polynomial]]) -> Result<()> {
        if let AdicIdeal::General(_) = self.ideal {
            return Err(Error::Unsupported("linear solving needs a variable ideal".into()));
        }
        for v in vectors {
            for p in v.iter() {
                if let Some(x) = p.variables().into_iter().find(|&x| !self.ideal.contains_variable(x)) {
                    return Err(Error::Unsupported(format!(
                        "t{x} is not an ideal variable; solving needs A_i finite-dimensional"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Builds the columns `mu * gens[k]` (with `min_deg <= deg mu <= level`)
    /// followed by the relation vectors.
    fn system(
        &self,
        target: &TruncatedElement,
        gens: &[TruncatedElement],
        min_deg: usize,
        extra_vars: &[u32],
    ) -> Result<LinearSystem> {
        let level = target.level;
        self.check_rank(&target.coords)?;
        for g in gens {
            if g.level != level {
                return Err(Error::LevelMismatch(g.level, level));
            }
            self.check_rank(&g.coords)?;
        }
        let mut all: Vec<&[Polynomial]> = gens.iter().map(|g| g.coords.as_slice()).collect();
        all.push(&target.coords);
        self.require_solvable(&all)?;
        let mut vars: BTreeSet<u32> = self.involved_vars(all.iter().copied()).into_iter().collect();
        vars.extend(extra_vars.iter().copied());
        let data = self.level_data(level, vars.into_iter().collect());
        let mus = monomials_up_to(data.space.vars(), min_deg, level);
        let mut columns = Vec::with_capacity(gens.len() * mus.len() + data.relation_vectors.len());
        for g in gens {
            for mu in &mus {
                let shifted: Vec<Polynomial> = g.coords.iter().map(|p| p.mul_monomial(mu)).collect();
                columns.push(data.space.encode(&shifted));
            }
        }
        columns.extend(data.relation_vectors.iter().cloned());
        let b = data.space.encode(&target.coords);
        Ok((data, mus, columns, b))
    }

    fn coefficients_from(&self, x: &[crate::field::Coeff], ngens: usize, mus: &[Monomial]) -> Vec<Polynomial> {
        (0..ngens)
            .map(|k| {
                Polynomial::from_terms(
                    self.field,
                    mus.iter().enumerate().map(|(j, mu)| (mu.clone(), x[k * mus.len() + j].clone())),
                )
            })
            .collect()
    }

    /// Finds `c_k in A_i` with `sum_k c_k * gens[k] = target` in `M_i`.
    pub fn module_solve(
        &self,
        target: &TruncatedElement,
        gens: &[TruncatedElement],
    ) -> Result<Option<Vec<Polynomial>>> {
        self.module_solve_graded(target, gens, 0)
    }

    /// As [`Self::module_solve`], with every coefficient restricted to
    /// monomials of degree at least `min_deg`.
    pub fn module_solve_graded(
        &self,
        target: &TruncatedElement,
        gens: &[TruncatedElement],
        min_deg: usize,
    ) -> Result<Option<Vec<Polynomial>>> {
        let (_, mus, columns, b) = self.system(target, gens, min_deg, &[])?;
        Ok(linalg::solve(self.field, &columns, &b).map(|x| self.coefficients_from(&x, gens.len(), &mus)))
    }

    /// All solutions of `sum_k c_k * gens[k] = target` in `M_i`.
    pub fn solution_space(
        &self,
        target: &TruncatedElement,
        gens: &[TruncatedElement],
    ) -> Result<Option<SolutionSpace>> {
        let (data, mus, columns, b) = self.system(target, gens, 0, &[])?;
        let Some(x) = linalg::solve(self.field, &columns, &b) else {
            return Ok(None);
        };
        let particular = self.coefficients_from(&x, gens.len(), &mus);
        let ncoef = gens.len() * mus.len();
        let mut span = Span::new(self.field, ncoef);
        let mut kernel = Vec::new();
        for k in linalg::nullspace(self.field, &columns, data.space.dim()) {
            let head = &k[..ncoef];
            if span.insert(head) {
                kernel.push(self.coefficients_from(head, gens.len(), &mus));
            }
        }
        Ok(Some(SolutionSpace { particular, kernel }))
    }

    /// `dim_K M_i` over the given variables.
    pub fn level_dimension(&self, level: usize, vars: &[u32]) -> usize {
        let mut vars: BTreeSet<u32> = vars.iter().copied().collect();
        vars.extend(self.relation_variables());
        let data = self.level_data(level, vars.into_iter().collect());
        data.space.dim() - data.relations.rank()
    }

    /// Rank of the `K`-span of `A_i * gens` inside `M_i`, over the involved
    /// variables together with `vars`.
    pub fn image_dimension(&self, gens: &[TruncatedElement], level: usize, vars: &[u32]) -> Result<usize> {
        let zero = self.zero(level);
        let (data, _, columns, _) = self.system(&zero, gens, 0, vars)?;
        let r = linalg::rank(&columns, data.space.dim());
        Ok(r - data.relations.rank())
    }

    /// True when `v` lies in the relation submodule itself (not merely
    /// modulo a power of the ideal), using cofactors of degree `<= extra`
    /// above `v`'s degree.
    pub fn in_relation_module(&self, v: &[Polynomial], extra: usize) -> Result<bool> {
        self.check_rank(v)?;
        if v.iter().all(Polynomial::is_zero) {
            return Ok(true);
        }
        if self.is_free() {
            return Ok(false);
        }
        let deg_v = v.iter().filter_map(Polynomial::degree).max().unwrap_or(0) as usize;
        let deg_r = self.relations.iter().flatten().filter_map(Polynomial::degree).max().unwrap_or(0) as usize;
        let d = deg_v + extra;
        for (_, comp) in self.outside_components(v) {
            let vars = self.involved_vars([comp.as_slice()]);
            let space = LevelSpace::new(self.field, vars, d + deg_r, self.rank);
            let mut span = Span::new(self.field, space.dim());
            for mu in monomials_up_to(space.vars(), 0, d) {
                for r in &self.relations {
                    let shifted: Vec<Polynomial> = r.iter().map(|p| p.mul_monomial(&mu)).collect();
                    span.insert(&space.encode(&shifted));
                }
            }
            if !span.contains(&space.encode(&comp)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The adic order of `v`: the largest `i <= cap` with `v ∈ a^i M`.
    pub fn ord_module(&self, v: &[Polynomial], cap: usize) -> Result<OrderValue> {
        self.check_rank(v)?;
        if v.iter().all(Polynomial::is_zero) {
            return Ok(OrderValue::Infinity);
        }
        if self.is_free() {
            return Ok(v.iter().map(|p| self.ideal.ord_ring(p, cap)).min_by(|a, b| a.cmp_floor(*b)).unwrap());
        }
        if self.in_relation_module(v, cap)? {
            return Ok(OrderValue::Infinity);
        }
        for i in 1..=cap + 1 {
            let t = self.truncate(v, i - 1)?;
            if !self.module_zero_test(&t)? {
                return Ok(OrderValue::Finite(i - 1));
            }
        }
        Ok(OrderValue::AtLeast(cap + 1))
    }

    /// Parses the line-oriented presentation format.
    pub fn parse(text: &str) -> Result<ModulePresentation> {
        let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
        let block = parse_block(&lines, None, None)?;
        if let Some((n, key, _)) = block.extra.first() {
            return Err(Error::Format { line: *n, message: format!("unknown key '{key}'") });
        }
        let ideal = block.ideal.ok_or(Error::Format { line: 0, message: "missing 'ideal:' line".into() })?;
        let rank = block.rank.ok_or(Error::Format { line: 0, message: "missing 'gens:' line".into() })?;
        ModulePresentation::new(block.field, ideal, rank, block.relations)
    }
}

impl fmt::Display for ModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field: {}", self.field)?;
        writeln!(f, "ideal: {}", self.ideal)?;
        writeln!(f, "gens: {}", self.rank)?;
        for r in &self.relations {
            let parts: Vec<String> = r.iter().map(|p| p.to_string()).collect();
            writeln!(f, "rel: {}", parts.join(", "))?;
        }
        Ok(())
    }
}

/// Fields collected from a presentation block.
pub(crate) struct Block {
    pub field: Field,
    pub ideal: Option<AdicIdeal>,
    pub rank: Option<usize>,
    pub relations: Vec<Vec<Polynomial>>,
    /// Lines with keys this parser does not know, left for the caller.
    pub extra: Vec<(usize, String, String)>,
}

pub(crate) fn format_error(line: usize, e: Error) -> Error {
    match e {
        Error::Format { message, .. } => Error::Format { line, message },
        other => Error::Format { line, message: other.to_string() },
    }
}

pub(crate) fn parse_poly_list(text: &str, sep: char, field: Field, line: usize) -> Result<Vec<Polynomial>> {
    text.split(sep).map(|s| parse_poly(s.trim(), field).map_err(|e| format_error(line, e))).collect()
}

pub(crate) fn parse_block(lines: &[(usize, &str)], field: Option<Field>, ideal: Option<AdicIdeal>) -> Result<Block> {
    let mut block =
        Block { field: field.unwrap_or(Field::Rational), ideal, rank: None, relations: Vec::new(), extra: Vec::new() };
    for &(n, raw) in lines {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(Error::Format { line: n, message: format!("expected 'key: value', found '{line}'") });
        };
        let value = value.trim();
        match key.trim() {
            "field" => {
                block.field = value.parse().map_err(|e| format_error(n, e))?;
            }
            "ideal" => block.ideal = Some(AdicIdeal::parse(value, block.field).map_err(|e| format_error(n, e))?),
            "gens" => {
                block.rank = Some(
                    value
                        .parse()
                        .map_err(|_| Error::Format { line: n, message: format!("bad generator count '{value}'") })?,
                )
            }
            "rel" => {
                let rank = block.rank.ok_or(Error::Format { line: n, message: "'rel' before 'gens'".into() })?;
                let r = parse_poly_list(value, ',', block.field, n)?;
                if r.len() != rank {
                    return Err(Error::Format {
                        line: n,
                        message: format!("relation has {} entries, expected {rank}", r.len()),
                    });
                }
                block.relations.push(r);
            }
            other => block.extra.push((n, other.to_string(), value.to_string())),
        }
    }
    Ok(block)
}
