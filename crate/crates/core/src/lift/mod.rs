//! Lifting algorithms: complete Nakayama, ord-preserving lifts along
//! surjections, free covers, and basis lifting for adic systems.

mod system;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::decay::{hom_apply, DecayStream, TermOracle};
use crate::error::{Error, Result};
use crate::ideal::OrderValue;
use crate::poly::{fmt_vector, Polynomial};
use crate::tower::TowerElement;
use crate::truncate::{vec_add, vec_scale, vec_sub, zero_vec, ModulePresentation, TruncatedElement};

pub use system::{basis_lift, AdicSystem, BasisLift, LevelCheck, SystemElement, SystemLevel};

/// A tower defined by a fixed representative, valid only up to `cap`.
pub(crate) fn capped_tower(module: Arc<ModulePresentation>, coords: Vec<Polynomial>, cap: usize) -> TowerElement {
    TowerElement::from_oracle(
        module,
        Arc::new(move |i| {
            if i > cap {
                return Err(Error::LevelBeyondCap { level: i, cap });
            }
            Ok(coords.clone())
        }),
    )
}

fn combination(
    coeffs: &[Polynomial],
    gens: &[TruncatedElement],
    field: crate::field::Field,
    rank: usize,
) -> Vec<Polynomial> {
    coeffs.iter().zip(gens).fold(zero_vec(field, rank), |acc, (c, g)| vec_add(&acc, &vec_scale(c, &g.coords)))
}

fn projections(family: &[TowerElement], level: usize) -> Result<Vec<TruncatedElement>> {
    family.iter().map(|f| f.project(level)).collect()
}

/// Whether the level-0 images of `family` generate `M_0`.
pub fn generates_level0(module: &ModulePresentation, family: &[TowerElement]) -> Result<bool> {
    let gens = projections(family, 0)?;
    Ok(module.image_dimension(&gens, 0, &[])? == module.level_dimension(0, &[]))
}

/// Outcome of [`nakayama_lift`].
#[derive(Clone, Debug)]
pub struct NakayamaLift {
    pub cap: usize,
    /// `g(z)` modulo `a^{cap+1}`.
    pub coefficients: Vec<Polynomial>,
    /// `sum_z g(z) m_z - m` vanishes in `M_i`, for each `i <= cap`.
    pub residual_zero: Vec<bool>,
    /// The coefficients as a ring stream supported on the family's indices.
    pub stream: DecayStream,
}

impl NakayamaLift {
    pub fn succeeded(&self) -> bool {
        self.residual_zero.iter().all(|&z| z)
    }
}

/// Writes `m` as `sum_z g(z) m_z` modulo `a^{cap+1}`: a level-0 solve, then
/// at each level a correction with coefficients homogeneous of that degree.
pub fn nakayama_lift(m: &TowerElement, family: &[TowerElement], cap: usize) -> Result<NakayamaLift> {
    let module = m.module().clone();
    if family.iter().any(|f| **f.module() != *module) {
        return Err(Error::ModuleMismatch);
    }
    let (field, rank) = (module.field(), module.rank());
    let target0 = m.project(0)?;
    let Some(mut coeffs) = module.module_solve(&target0, &projections(family, 0)?)? else {
        return Err(Error::NotGenerating {
            level: 0,
            witness: format!("{target0} is not in the span of the family in M_0"),
        });
    };
    for i in 1..=cap {
        let gens = projections(family, i)?;
        let approx = combination(&coeffs, &gens, field, rank);
        let residual = TruncatedElement { level: i, coords: vec_sub(&m.project(i)?.coords, &approx) };
        let Some(d) = module.module_solve_graded(&residual, &gens, i)? else {
            return Err(Error::NotGenerating { level: i, witness: format!("residual {residual}") });
        };
        coeffs = vec_add(&coeffs, &d);
    }
    let ideal = module.ideal().clone();
    let coeffs: Vec<Polynomial> = coeffs.iter().map(|c| ideal.normal_form(c, cap)).collect::<Result<_>>()?;
    let mut residual_zero = Vec::with_capacity(cap + 1);
    for i in 0..=cap {
        let gens = projections(family, i)?;
        let diff = vec_sub(&combination(&coeffs, &gens, field, rank), &m.project(i)?.coords);
        residual_zero.push(module.module_zero_test(&TruncatedElement { level: i, coords: diff })?);
    }
    let ring = Arc::new(ModulePresentation::ring(field, ideal));
    let entries =
        coeffs.iter().enumerate().map(|(z, c)| (z, capped_tower(ring.clone(), vec![c.clone()], cap))).collect();
    let stream = DecayStream::finite(ring, entries)?;
    Ok(NakayamaLift { cap, coefficients: coeffs, residual_zero, stream })
}

/// A homomorphism `source -> target` given by the images of the source
/// generators.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    source: Arc<ModulePresentation>,
    target: Arc<ModulePresentation>,
    columns: Vec<Vec<Polynomial>>,
}

impl ModuleMap {
    pub fn new(
        source: Arc<ModulePresentation>,
        target: Arc<ModulePresentation>,
        columns: Vec<Vec<Polynomial>>,
    ) -> Result<ModuleMap> {
        if source.ideal() != target.ideal() || source.field() != target.field() {
            return Err(Error::ModuleMismatch);
        }
        if columns.len() != source.rank() {
            return Err(Error::Precondition(format!(
                "{} images given for {} generators",
                columns.len(),
                source.rank()
            )));
        }
        for c in &columns {
            target.check_rank(c)?;
        }
        Ok(ModuleMap { source, target, columns })
    }

    pub fn source(&self) -> &Arc<ModulePresentation> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ModulePresentation> {
        &self.target
    }

    pub fn apply(&self, x: &[Polynomial]) -> Vec<Polynomial> {
        x.iter()
            .zip(&self.columns)
            .fold(zero_vec(self.target.field(), self.target.rank()), |acc, (c, col)| vec_add(&acc, &vec_scale(c, col)))
    }

    fn images_at(&self, level: usize) -> Result<Vec<TruncatedElement>> {
        self.columns.iter().map(|c| self.target.truncate(c, level)).collect()
    }

    /// Every source relation must map to zero in `target_cap`.
    pub fn check_well_defined(&self, cap: usize) -> Result<()> {
        for r in self.source.relations() {
            let image = self.target.truncate(&self.apply(r), cap)?;
            if !self.target.module_zero_test(&image)? {
                return Err(Error::IllDefinedMap(format!(
                    "relation {} maps to {} at level {cap}",
                    fmt_vector(r),
                    fmt_vector(&image.coords)
                )));
            }
        }
        Ok(())
    }

    /// Surjectivity on `M_0`, which lifts to every level by nilpotence.
    pub fn check_surjective(&self) -> Result<()> {
        let images = self.images_at(0)?;
        for k in 0..self.target.rank() {
            let e = self.target.generator(k, 0);
            if self.target.module_solve(&e, &images)?.is_none() {
                return Err(Error::NotSurjective { witness: format!("generator e{} of the target at level 0", k + 1) });
            }
        }
        Ok(())
    }
}

/// Orders of one lifted term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftOrder {
    pub index: usize,
    pub target: OrderValue,
    pub lift: OrderValue,
}

#[derive(Clone, Debug)]
pub struct SurjectionLift {
    pub cap: usize,
    pub stream: DecayStream,
    pub lifts: BTreeMap<usize, Vec<Polynomial>>,
    pub orders: Vec<LiftOrder>,
}

/// Lifts a decaying stream along a surjection `phi: M -> M''`, choosing for
/// each term a preimage whose coefficients have the largest feasible lowest
/// degree, starting from the order of the term.
pub fn lift_along_surjection(phi: &ModuleMap, f: &DecayStream, cap: usize) -> Result<SurjectionLift> {
    if **f.module() != *phi.target {
        return Err(Error::ModuleMismatch);
    }
    phi.check_well_defined(cap)?;
    phi.check_surjective()?;
    f.check(cap)?;
    let images = phi.images_at(cap)?;
    let source = phi.source.clone();
    let mut lifts = BTreeMap::new();
    let mut orders = Vec::new();
    for z in 0..f.declared_bound(cap).unwrap_or(0) {
        let y = f.term(z)?;
        let OrderValue::Finite(e) = y.ord_prime(cap)? else {
            continue;
        };
        let target = y.project(cap)?;
        let mut found = None;
        for j in (0..=e).rev() {
            if let Some(x) = phi.target.module_solve_graded(&target, &images, j)? {
                found = Some(x);
                break;
            }
        }
        let x = found.ok_or_else(|| Error::NotSurjective { witness: format!("term {z} = {target}") })?;
        let lift = source.ord_module(&x, cap)?;
        orders.push(LiftOrder { index: z, target: OrderValue::Finite(e), lift });
        lifts.insert(z, x);
    }
    let (s, stored) = (source.clone(), Arc::new(lifts.clone()));
    let g = f.clone();
    let stream = DecayStream::new(
        source,
        Arc::new(move |z| {
            Ok(match stored.get(&z) {
                Some(x) => capped_tower(s.clone(), x.clone(), cap),
                None => TowerElement::zero(s.clone()),
            })
        }),
        Arc::new(move |i| if i <= cap { g.declared_bound(i) } else { None }),
    );
    Ok(SurjectionLift { cap, stream, lifts, orders })
}

/// The surjection `F_dec(Z, A^) -> M^` sending `delta_k` to the `k`-th
/// generator, with its verification data.
#[derive(Clone, Debug)]
pub struct FreeCover {
    pub module: Arc<ModulePresentation>,
    pub cap: usize,
    /// Surjectivity verified at each level `<= cap`.
    pub surjective: Vec<bool>,
    /// A basis of the kernel `{ c : sum_k c_k e_k = 0 in M_cap }`.
    pub kernel: Vec<Vec<Polynomial>>,
}

impl FreeCover {
    pub fn index_count(&self) -> usize {
        self.module.rank()
    }

    /// `phi(g) = sum_k g(k) e_k`.
    pub fn apply(&self, g: &DecayStream) -> Result<TowerElement> {
        let m = self.module.clone();
        let family: TermOracle = Arc::new(move |z| {
            if z < m.rank() {
                TowerElement::from_element(m.generator(z, 0).coords, m.clone())
            } else {
                Ok(TowerElement::zero(m.clone()))
            }
        });
        hom_apply(g, self.module.clone(), family, self.cap)
    }
}

pub fn free_cover(module: Arc<ModulePresentation>, cap: usize) -> Result<FreeCover> {
    let rank = module.rank();
    let mut surjective = Vec::with_capacity(cap + 1);
    for i in 0..=cap {
        let gens: Vec<TruncatedElement> = (0..rank).map(|k| module.generator(k, i)).collect();
        let mut ok = true;
        for k in 0..rank {
            ok &= module.module_solve(&module.generator(k, i), &gens)?.is_some();
        }
        surjective.push(ok);
    }
    let gens: Vec<TruncatedElement> = (0..rank).map(|k| module.generator(k, cap)).collect();
    let kernel = module.solution_space(&module.zero(cap), &gens)?.map(|s| s.kernel).unwrap_or_default();
    Ok(FreeCover { module, cap, surjective, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::ideal::AdicIdeal;
    use crate::poly::parse_poly;

    fn q(s: &str) -> Polynomial {
        parse_poly(s, Field::Rational).unwrap()
    }

    fn ring() -> Arc<ModulePresentation> {
        Arc::new(ModulePresentation::ring(Field::Rational, AdicIdeal::vars([1])))
    }

    fn tower(m: &Arc<ModulePresentation>, s: &str) -> TowerElement {
        TowerElement::from_element(vec![q(s)], m.clone()).unwrap()
    }

    #[test]
    fn geometric_inverse() {
        let a = ring();
        let lift = nakayama_lift(&tower(&a, "1"), &[tower(&a, "1 + t1")], 5).unwrap();
        assert!(lift.succeeded());
        assert_eq!(lift.coefficients[0], q("1 - t1 + t1^2 - t1^3 + t1^4 - t1^5"));
    }

    #[test]
    fn not_generating() {
        let a = ring();
        let r = nakayama_lift(&tower(&a, "1"), &[tower(&a, "t1")], 3);
        assert!(matches!(r, Err(Error::NotGenerating { level: 0, .. })));
    }

    #[test]
    fn lift_to_quotient() {
        let a = ring();
        let quot =
            Arc::new(ModulePresentation::new(Field::Rational, AdicIdeal::vars([1]), 1, vec![vec![q("t1^2")]]).unwrap());
        let phi = ModuleMap::new(a.clone(), quot.clone(), vec![vec![q("1")]]).unwrap();
        let f = DecayStream::single(2, TowerElement::from_element(vec![q("t1")], quot).unwrap());
        let lift = lift_along_surjection(&phi, &f, 4).unwrap();
        assert_eq!(lift.lifts[&2], vec![q("t1")]);
        assert_eq!(lift.orders[0].lift, OrderValue::Finite(1));
        let times_t = ModuleMap::new(a.clone(), a, vec![vec![q("t1")]]).unwrap();
        assert!(matches!(times_t.check_surjective(), Err(Error::NotSurjective { .. })));
    }

    #[test]
    fn cover_of_free_module_is_injective() {
        let cover = free_cover(ring(), 4).unwrap();
        assert!(cover.surjective.iter().all(|&s| s));
        assert!(cover.kernel.is_empty());
    }
}
