//! Adic systems `(M_i, psi_i)` and basis lifting in the local case.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::ideal::{AdicIdeal, VariableSet};
use crate::poly::{fmt_vector, Polynomial};
use crate::truncate::{
    format_error, monomials_up_to, parse_block, parse_poly_list, vec_add, vec_scale, zero_vec, ModulePresentation,
    TruncatedElement,
};

/// Header line, level index and body lines of a `level` block.
type Section<'a> = (usize, usize, Vec<(usize, &'a str)>);

/// One level of an adic system: `M_i` and the transition `psi_i: M_i -> M_{i-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemLevel {
    pub module: ModulePresentation,
    /// Rows indexed by generators of `M_{i-1}`, columns by generators of `M_i`.
    pub psi: Option<Vec<Vec<Polynomial>>>,
}

/// A finite stretch `M_0, ..., M_n` of an adic system over a ring whose
/// ideal is generated by finitely many variables.
#[derive(Clone, Debug, PartialEq)]
pub struct AdicSystem {
    field: Field,
    ideal: AdicIdeal,
    levels: Vec<SystemLevel>,
}

impl AdicSystem {
    pub fn new(field: Field, ideal: AdicIdeal, levels: Vec<SystemLevel>) -> Result<AdicSystem> {
        if !matches!(ideal, AdicIdeal::Variables(VariableSet::Finite(_))) {
            return Err(Error::Unsupported("adic systems need finitely many ideal variables".into()));
        }
        for (i, l) in levels.iter().enumerate() {
            if l.module.field() != field || *l.module.ideal() != ideal {
                return Err(Error::InvalidSystem { level: i, reason: "field or ideal differs from the system".into() });
            }
            match (&l.psi, i) {
                (None, 0) => {}
                (Some(_), 0) => {
                    return Err(Error::InvalidSystem { level: 0, reason: "level 0 has no transition".into() })
                }
                (None, _) => return Err(Error::InvalidSystem { level: i, reason: "missing psi".into() }),
                (Some(rows), _) => {
                    let (n_prev, n) = (levels[i - 1].module.rank(), l.module.rank());
                    if rows.len() != n_prev || rows.iter().any(|r| r.len() != n) {
                        return Err(Error::InvalidSystem { level: i, reason: format!("psi must be {n_prev} x {n}") });
                    }
                }
            }
        }
        Ok(AdicSystem { field, ideal, levels })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ideal(&self) -> &AdicIdeal {
        &self.ideal
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, i: usize) -> Result<&SystemLevel> {
        self.levels.get(i).ok_or(Error::LevelBeyondCap { level: i, cap: self.levels.len().saturating_sub(1) })
    }

    fn vars(&self) -> Vec<u32> {
        match &self.ideal {
            AdicIdeal::Variables(VariableSet::Finite(s)) => s.iter().copied().collect(),
            _ => unreachable!("checked in new"),
        }
    }

    /// `psi_i(e_c)`, in the coordinates of `M_{i-1}`.
    pub fn psi_column(&self, i: usize, c: usize) -> Result<Vec<Polynomial>> {
        let rows =
            self.level(i)?.psi.as_ref().ok_or(Error::InvalidSystem { level: i, reason: "missing psi".into() })?;
        Ok(rows.iter().map(|r| r[c].clone()).collect())
    }

    pub fn apply_psi(&self, i: usize, x: &[Polynomial]) -> Result<Vec<Polynomial>> {
        let target_rank = self.level(i - 1)?.module.rank();
        let mut acc = zero_vec(self.field, target_rank);
        for (c, xc) in x.iter().enumerate() {
            acc = vec_add(&acc, &vec_scale(xc, &self.psi_column(i, c)?));
        }
        Ok(acc)
    }

    /// Checks that `psi_i` induces `A_{i-1} ⊗ M_i ≅ M_{i-1}`.
    pub fn verify_level(&self, i: usize) -> Result<()> {
        let invalid = |reason: String| Error::InvalidSystem { level: i, reason };
        let src = &self.level(i)?.module;
        let dst = &self.level(i - 1)?.module;
        for r in src.relations() {
            let image = dst.truncate(&self.apply_psi(i, r)?, i - 1)?;
            if !dst.module_zero_test(&image)? {
                return Err(invalid(format!("relation {} does not map to zero", fmt_vector(r))));
            }
        }
        let images: Vec<TruncatedElement> =
            (0..src.rank()).map(|c| dst.truncate(&self.psi_column(i, c)?, i - 1)).collect::<Result<_>>()?;
        for k in 0..dst.rank() {
            if dst.module_solve(&dst.generator(k, i - 1), &images)?.is_none() {
                return Err(invalid(format!("psi misses generator e{}", k + 1)));
            }
        }
        let vars = self.vars();
        let (d_src, d_dst) = (src.level_dimension(i - 1, &vars), dst.level_dimension(i - 1, &vars));
        if d_src != d_dst {
            return Err(invalid(format!("dim A_{} ⊗ M_{i} = {d_src} but dim M_{} = {d_dst}", i - 1, i - 1)));
        }
        Ok(())
    }

    /// Parses `field:`/`ideal:` headers followed by `level <i>:` blocks.
    pub fn parse(text: &str) -> Result<AdicSystem> {
        let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
        let mut sections: Vec<Section> = Vec::new();
        let mut header: Vec<(usize, &str)> = Vec::new();
        for &(n, raw) in &lines {
            let line = raw.split('#').next().unwrap().trim();
            if let Some(rest) = line.strip_prefix("level") {
                let idx = rest.trim().strip_suffix(':').map(str::trim).and_then(|s| s.parse::<usize>().ok());
                let Some(idx) = idx else {
                    return Err(Error::Format { line: n, message: format!("expected 'level <i>:', found '{line}'") });
                };
                if idx != sections.len() {
                    return Err(Error::Format { line: n, message: format!("expected level {}", sections.len()) });
                }
                sections.push((n, idx, Vec::new()));
            } else if let Some(s) = sections.last_mut() {
                s.2.push((n, raw));
            } else {
                header.push((n, raw));
            }
        }
        let head = parse_block(&header, None, None)?;
        if let Some((n, key, _)) = head.extra.first() {
            return Err(Error::Format { line: *n, message: format!("unexpected '{key}' before the first level") });
        }
        if head.rank.is_some() {
            return Err(Error::Format { line: 0, message: "'gens' belongs inside a level block".into() });
        }
        let ideal = head.ideal.ok_or(Error::Format { line: 0, message: "missing 'ideal:' line".into() })?;
        let field = head.field;
        let mut levels = Vec::new();
        for (n, idx, body) in sections {
            let block = parse_block(&body, Some(field), Some(ideal.clone()))?;
            let rank = block.rank.ok_or(Error::Format { line: n, message: format!("level {idx} lacks 'gens:'") })?;
            let mut psi = None;
            for (ln, key, value) in &block.extra {
                if key != "psi" {
                    return Err(Error::Format { line: *ln, message: format!("unknown key '{key}'") });
                }
                let rows = value.split(';').map(|r| parse_poly_list(r, ',', field, *ln)).collect::<Result<Vec<_>>>()?;
                psi = Some(rows);
            }
            let module =
                ModulePresentation::new(field, ideal.clone(), rank, block.relations).map_err(|e| format_error(n, e))?;
            levels.push(SystemLevel { module, psi });
        }
        AdicSystem::new(field, ideal, levels)
    }
}

impl fmt::Display for AdicSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field: {}", self.field)?;
        writeln!(f, "ideal: {}", self.ideal)?;
        for (i, l) in self.levels.iter().enumerate() {
            writeln!(f, "level {i}:")?;
            writeln!(f, "gens: {}", l.module.rank())?;
            for r in l.module.relations() {
                let parts: Vec<String> = r.iter().map(|p| p.to_string()).collect();
                writeln!(f, "rel: {}", parts.join(", "))?;
            }
            if let Some(rows) = &l.psi {
                let rows: Vec<String> =
                    rows.iter().map(|r| r.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")).collect();
                writeln!(f, "psi: {}", rows.join("; "))?;
            }
        }
        Ok(())
    }
}

/// An element of `lim M_i` given by its coordinates at each level.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemElement {
    pub levels: Vec<Vec<Polynomial>>,
}

/// Verification data for one level of a basis lift.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelCheck {
    pub level: usize,
    pub module_dim: usize,
    pub ring_dim: usize,
    /// `Y` with `Y X = I` over `A_i`, where `X` holds the basis coordinates;
    /// row `j`, column `k` is the `j`-th basis coefficient of `e_k`.
    pub inverse: Vec<Vec<Polynomial>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisLift {
    pub rank: usize,
    pub basis: Vec<SystemElement>,
    pub checks: Vec<LevelCheck>,
}

fn require_local(system: &AdicSystem) -> Result<()> {
    for (i, l) in system.levels.iter().enumerate() {
        let mut polys: Vec<&Polynomial> = l.module.relations().iter().flatten().collect();
        if let Some(rows) = &l.psi {
            polys.extend(rows.iter().flatten());
        }
        if let Some(v) = polys.iter().flat_map(|p| p.variables()).find(|&v| !system.ideal.contains_variable(v)) {
            return Err(Error::Unsupported(format!(
                "level {i} uses t{v}, which is not an ideal variable; A_0 must be the base field"
            )));
        }
    }
    Ok(())
}

fn relation_witness(module: &ModulePresentation, basis: &[TruncatedElement], level: usize) -> Result<String> {
    let kernel = module.solution_space(&module.zero(level), basis)?.map(|s| s.kernel).unwrap_or_default();
    Ok(match kernel.first() {
        Some(k) => format!("{} = 0", fmt_vector(k)),
        None => "lifted family does not generate".into(),
    })
}

/// Lifts a basis of `M_0` through the transitions and verifies that
/// `A_i^r -> M_i` is an isomorphism for every `i <= cap`.
pub fn basis_lift(system: &AdicSystem, cap: usize) -> Result<BasisLift> {
    require_local(system)?;
    system.level(cap)?;
    for i in 1..=cap {
        system.verify_level(i)?;
    }
    let vars = system.vars();
    let field = system.field;
    let m0 = &system.levels[0].module;
    let target_dim = m0.level_dimension(0, &vars);
    let mut chosen: Vec<TruncatedElement> = Vec::new();
    let mut current = 0;
    for k in 0..m0.rank() {
        if current == target_dim {
            break;
        }
        chosen.push(m0.generator(k, 0));
        let d = m0.image_dimension(&chosen, 0, &vars)?;
        if d > current {
            current = d;
        } else {
            chosen.pop();
        }
    }
    let rank = chosen.len();
    let mut coords: Vec<Vec<Polynomial>> = chosen.into_iter().map(|t| t.coords).collect();
    let mut basis: Vec<SystemElement> = coords.iter().map(|c| SystemElement { levels: vec![c.clone()] }).collect();
    let mut checks = Vec::with_capacity(cap + 1);
    for i in 0..=cap {
        let mi = &system.levels[i].module;
        if i > 0 {
            let prev = &system.levels[i - 1].module;
            let images: Vec<TruncatedElement> =
                (0..mi.rank()).map(|c| prev.truncate(&system.psi_column(i, c)?, i - 1)).collect::<Result<_>>()?;
            let mut next = Vec::with_capacity(rank);
            for x in &coords {
                let target = prev.truncate(x, i - 1)?;
                let c = prev
                    .module_solve(&target, &images)?
                    .ok_or(Error::InvalidSystem { level: i, reason: format!("{target} has no preimage under psi") })?;
                next.push(c);
            }
            coords = next;
            for (b, x) in basis.iter_mut().zip(&coords) {
                b.levels.push(x.clone());
            }
        }
        let xs: Vec<TruncatedElement> = coords.iter().map(|x| mi.truncate(x, i)).collect::<Result<_>>()?;
        let ring_dim = monomials_up_to(&vars, 0, i).len();
        let module_dim = mi.level_dimension(i, &vars);
        if module_dim != rank * ring_dim || mi.image_dimension(&xs, i, &vars)? != module_dim {
            return Err(Error::NotFlat { level: i, relation: relation_witness(mi, &xs, i)? });
        }
        let inverse = explicit_inverse(mi, &xs, i, field)?;
        checks.push(LevelCheck { level: i, module_dim, ring_dim, inverse });
    }
    Ok(BasisLift { rank, basis, checks })
}

/// Solves `e_k = sum_j y_{jk} x_j` for every generator and checks `Y X = I`
/// and `Y rho = 0` for every relation `rho`, over `A_i`.
fn explicit_inverse(
    mi: &ModulePresentation,
    xs: &[TruncatedElement],
    level: usize,
    field: Field,
) -> Result<Vec<Vec<Polynomial>>> {
    let r = xs.len();
    let mut y = vec![Vec::with_capacity(mi.rank()); r];
    for k in 0..mi.rank() {
        let col = mi
            .module_solve(&mi.generator(k, level), xs)?
            .ok_or(Error::NotFlat { level, relation: format!("e{} is not reached by the lifted basis", k + 1) })?;
        for (row, c) in y.iter_mut().zip(col) {
            row.push(c);
        }
    }
    let ideal = mi.ideal();
    let apply = |v: &[Polynomial]| -> Result<Vec<Polynomial>> {
        y.iter()
            .map(|row| {
                let s = row.iter().zip(v).fold(Polynomial::zero(field), |acc, (a, b)| &acc + &(a * b));
                ideal.normal_form(&s, level)
            })
            .collect()
    };
    for (j, x) in xs.iter().enumerate() {
        let got = apply(&x.coords)?;
        let expect: Vec<Polynomial> = (0..r).map(|l| Polynomial::from_i64(field, i64::from(l == j))).collect();
        if got != expect {
            return Err(Error::NotFlat { level, relation: format!("Y X column {} is {}", j + 1, fmt_vector(&got)) });
        }
    }
    for rho in mi.relations() {
        let got = apply(rho)?;
        if got.iter().any(|p| !p.is_zero()) {
            return Err(Error::NotFlat {
                level,
                relation: format!("{} survives as {}", fmt_vector(rho), fmt_vector(&got)),
            });
        }
    }
    Ok(y)
}
