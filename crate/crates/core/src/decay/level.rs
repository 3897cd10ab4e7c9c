//! Finite-support functions into a truncation `M_i`, and coherent
//! sequences of them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use super::DecayStream;
use crate::error::{Error, Result};
use crate::tower::TowerElement;
use crate::truncate::{ModulePresentation, TruncatedElement};

/// An element of `F_fin(N, M_i)`. Zero values are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinFn {
    level: usize,
    entries: BTreeMap<usize, TruncatedElement>,
}

impl FinFn {
    pub fn new(module: &ModulePresentation, level: usize, entries: BTreeMap<usize, TruncatedElement>) -> Result<FinFn> {
        let mut kept = BTreeMap::new();
        for (z, v) in entries {
            if v.level != level {
                return Err(Error::LevelMismatch(v.level, level));
            }
            if !module.module_zero_test(&v)? {
                kept.insert(z, v);
            }
        }
        Ok(FinFn { level, entries: kept })
    }

    /// `delta_z` at level `i` in the ring.
    pub fn delta(ring: &ModulePresentation, level: usize, z: usize) -> FinFn {
        let one = ring.generator(0, level);
        FinFn { level, entries: BTreeMap::from([(z, one)]) }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn entries(&self) -> &BTreeMap<usize, TruncatedElement> {
        &self.entries
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn get(&self, module: &ModulePresentation, z: usize) -> TruncatedElement {
        self.entries.get(&z).cloned().unwrap_or_else(|| module.zero(self.level))
    }

    pub fn project(&self, module: &ModulePresentation, level: usize) -> Result<FinFn> {
        let entries = self.entries.iter().map(|(z, v)| Ok((*z, module.project(v, level)?))).collect::<Result<_>>()?;
        FinFn::new(module, level, entries)
    }

    /// Equality as functions into `M_i`.
    pub fn equals(&self, module: &ModulePresentation, other: &FinFn) -> Result<bool> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        if self.support() != other.support() {
            return Ok(false);
        }
        for (z, v) in &self.entries {
            if !module.equal_at(v, &other.entries[z])? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The lift `sum_z v_z delta_z` with `v_z` the stored representatives.
    pub fn lift(&self, module: Arc<ModulePresentation>) -> Result<DecayStream> {
        let entries = self
            .entries
            .iter()
            .map(|(z, v)| Ok((*z, TowerElement::from_element(v.coords.clone(), module.clone())?)))
            .collect::<Result<_>>()?;
        DecayStream::finite(module, entries)
    }
}

impl fmt::Display for FinFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(z, v)| format!("{z}: {v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub type FinFnOracle = Arc<dyn Fn(usize) -> Result<FinFn> + Send + Sync>;

/// A sequence of finite-support functions, one per level, checked for
/// coherence under projection as levels are evaluated.
#[derive(Clone)]
pub struct LevelStream {
    module: Arc<ModulePresentation>,
    oracle: FinFnOracle,
    memo: Arc<Mutex<BTreeMap<usize, FinFn>>>,
}

impl fmt::Debug for LevelStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevelStream").field("evaluated", &self.memo.lock().unwrap().keys().collect::<Vec<_>>()).finish()
    }
}

impl LevelStream {
    pub fn new(module: Arc<ModulePresentation>, oracle: FinFnOracle) -> LevelStream {
        LevelStream { module, oracle, memo: Arc::new(Mutex::new(BTreeMap::new())) }
    }

    pub fn module(&self) -> &Arc<ModulePresentation> {
        &self.module
    }

    pub fn level(&self, i: usize) -> Result<FinFn> {
        if let Some(hit) = self.memo.lock().unwrap().get(&i) {
            return Ok(hit.clone());
        }
        let f = (self.oracle)(i)?;
        if f.level != i {
            return Err(Error::LevelMismatch(f.level, i));
        }
        let known: Vec<(usize, FinFn)> = self.memo.lock().unwrap().iter().map(|(k, v)| (*k, v.clone())).collect();
        for (j, other) in known {
            let (lower, upper, low, high) = if j < i { (j, i, &other, &f) } else { (i, j, &f, &other) };
            if !high.project(&self.module, lower)?.equals(&self.module, low)? {
                return Err(Error::Coherence { lower, upper });
            }
        }
        self.memo.lock().unwrap().insert(i, f.clone());
        Ok(f)
    }
}

/// The image of `f` in `lim F_fin(N, M_i)`: level `i` is the restriction of
/// `pi_i . f` to its threshold-`i` support.
pub fn to_level_stream(f: &DecayStream, cap: usize) -> Result<LevelStream> {
    f.check(cap)?;
    let g = f.clone();
    let module = f.module().clone();
    let m = module.clone();
    Ok(LevelStream::new(
        module,
        Arc::new(move |i| {
            if i > cap {
                return Err(Error::LevelBeyondCap { level: i, cap });
            }
            let entries = g.support(i)?.into_iter().map(|z| Ok((z, g.term(z)?.project(i)?))).collect::<Result<_>>()?;
            FinFn::new(&m, i, entries)
        }),
    ))
}

/// Assembles a decaying stream from a coherent level stream: term `z` is the
/// tower of its values `s(i)(z)`. Levels `0..=cap` are checked for coherence
/// before anything is returned.
pub fn from_level_stream(s: &LevelStream, cap: usize) -> Result<DecayStream> {
    let mut bounds = Vec::with_capacity(cap + 1);
    for i in 0..=cap {
        let f = s.level(i)?;
        bounds.push(f.entries.keys().next_back().map_or(0, |z| z + 1));
    }
    let module = s.module.clone();
    let (s2, m2) = (s.clone(), module.clone());
    Ok(DecayStream::new(
        module,
        Arc::new(move |z| {
            let s = s2.clone();
            let m = m2.clone();
            Ok(TowerElement::from_oracle(
                m2.clone(),
                Arc::new(move |i| {
                    if i > cap {
                        return Err(Error::LevelBeyondCap { level: i, cap });
                    }
                    Ok(s.level(i)?.get(&m, z).coords)
                }),
            ))
        }),
        Arc::new(move |i| bounds.get(i).copied()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::ideal::AdicIdeal;

    #[test]
    fn bseries_level_images() {
        let b = DecayStream::bseries(Field::Rational);
        let s = to_level_stream(&b, 4).unwrap();
        assert_eq!(s.level(2).unwrap().support(), vec![1, 2]);
        let back = from_level_stream(&s, 4).unwrap();
        assert!(back.agrees_with(&b, 4).unwrap());
    }

    #[test]
    fn delta_level_stream() {
        let ring = Arc::new(ModulePresentation::ring(Field::Rational, AdicIdeal::vars([1])));
        let s = to_level_stream(&DecayStream::delta(ring.clone(), 3), 5).unwrap();
        for i in 0..=5 {
            assert_eq!(s.level(i).unwrap(), FinFn::delta(&ring, i, 3));
        }
    }

    #[test]
    fn incoherent_levels_are_rejected() {
        let ring = Arc::new(ModulePresentation::ring(Field::Rational, AdicIdeal::vars([1])));
        let r = ring.clone();
        let s = LevelStream::new(
            ring,
            Arc::new(move |i| Ok(if i == 0 { FinFn::delta(&r, 0, 0) } else { FinFn::delta(&r, i, 1) })),
        );
        assert!(matches!(from_level_stream(&s, 2), Err(Error::Coherence { lower: 0, upper: 1 })));
    }
}
