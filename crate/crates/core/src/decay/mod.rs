//! Decaying functions `Z -> M^` on `Z = N`, their series, and the maps
//! between function modules.

mod index;
mod level;
mod syntax;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::ideal::AdicIdeal;
use crate::poly::{Monomial, Polynomial};
use crate::tower::TowerElement;
use crate::truncate::{vec_add, zero_vec, ModulePresentation};

pub use index::TupleIndex;
pub use level::{from_level_stream, to_level_stream, FinFn, LevelStream};
pub use syntax::StreamSpec;

/// Term `z` of a stream, as a completion element.
pub type TermOracle = Arc<dyn Fn(usize) -> Result<TowerElement> + Send + Sync>;
/// `N_i`: every `z >= N_i` has `ord(f(z)) > i`. `None` means no bound is known.
pub type SupportBound = Arc<dyn Fn(usize) -> Option<usize> + Send + Sync>;
/// A family of ring elements indexed by `Z`.
pub type PolyFamily = Arc<dyn Fn(usize) -> Polynomial + Send + Sync>;
pub type IndexMap = Arc<dyn Fn(usize) -> usize + Send + Sync>;

/// A function `Z -> M^` with a declared support bound per threshold.
///
/// [`DecayStream::check`] verifies the declared bounds: every term below
/// `N_i` is inspected, and a window of terms past it must vanish at level
/// `i`. Terms and certificates are memoized; clones share both.
#[derive(Clone)]
pub struct DecayStream {
    module: Arc<ModulePresentation>,
    terms: TermOracle,
    bound: SupportBound,
    memo: Arc<Mutex<BTreeMap<usize, TowerElement>>>,
    supports: Arc<Mutex<BTreeMap<usize, Vec<usize>>>>,
}

impl fmt::Debug for DecayStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DecayStream")
            .field("module", &self.module)
            .field("certified", &self.supports.lock().unwrap().keys().collect::<Vec<_>>())
            .finish()
    }
}

/// Threshold supports certified by [`DecayStream::check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecayCertificate {
    pub cap: usize,
    /// `supports[i] = { z : ord(f(z)) <= i }`.
    pub supports: Vec<Vec<usize>>,
}

impl fmt::Display for DecayCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.supports.iter().enumerate() {
            let items: Vec<String> = s.iter().map(|z| z.to_string()).collect();
            writeln!(f, "{i}: {{{}}}", items.join(", "))?;
        }
        Ok(())
    }
}

fn ring_of(field: Field, ideal: AdicIdeal) -> Arc<ModulePresentation> {
    Arc::new(ModulePresentation::ring(field, ideal))
}

impl DecayStream {
    pub fn new(module: Arc<ModulePresentation>, terms: TermOracle, bound: SupportBound) -> DecayStream {
        DecayStream {
            module,
            terms,
            bound,
            memo: Arc::new(Mutex::new(BTreeMap::new())),
            supports: Arc::new(Mutex::new(BTreeMap::new())),
        }
    }

    pub fn zero(module: Arc<ModulePresentation>) -> DecayStream {
        let m = module.clone();
        DecayStream::new(module, Arc::new(move |_| Ok(TowerElement::zero(m.clone()))), Arc::new(|_| Some(0)))
    }

    /// The stream with the given terms and zero elsewhere.
    pub fn finite(module: Arc<ModulePresentation>, entries: BTreeMap<usize, TowerElement>) -> Result<DecayStream> {
        if entries.values().any(|t| **t.module() != *module) {
            return Err(Error::ModuleMismatch);
        }
        let n = entries.keys().next_back().map_or(0, |z| z + 1);
        let m = module.clone();
        let entries = Arc::new(entries);
        Ok(DecayStream::new(
            module,
            Arc::new(move |z| Ok(entries.get(&z).cloned().unwrap_or_else(|| TowerElement::zero(m.clone())))),
            Arc::new(move |_| Some(n)),
        ))
    }

    /// `value` at `z`, zero elsewhere.
    pub fn single(z: usize, value: TowerElement) -> DecayStream {
        let module = value.module().clone();
        DecayStream::finite(module, BTreeMap::from([(z, value)])).expect("one module")
    }

    /// `delta_z` in `F_dec(N, A^)`.
    pub fn delta(ring: Arc<ModulePresentation>, z: usize) -> DecayStream {
        let one = TowerElement::from_element(vec![Polynomial::one(ring.field())], ring).expect("rank one");
        DecayStream::single(z, one)
    }

    /// `k -> t_k^k` for `k >= 1` over `vars *`; `N_i = i + 1`.
    pub fn bseries(field: Field) -> DecayStream {
        let ring = ring_of(field, AdicIdeal::all_variables());
        let r = ring.clone();
        DecayStream::new(
            ring,
            Arc::new(move |k| {
                let p = if k == 0 {
                    Polynomial::zero(field)
                } else {
                    Polynomial::monomial(field, Monomial::var_pow(k as u32, k as u32))
                };
                TowerElement::from_element(vec![p], r.clone())
            }),
            Arc::new(|i| Some(i + 1)),
        )
    }

    /// `i -> t1^i` over `a = (t1)`; `N_j = j + 1`.
    pub fn geom(field: Field) -> DecayStream {
        let ring = ring_of(field, AdicIdeal::vars([1]));
        let r = ring.clone();
        DecayStream::new(
            ring,
            Arc::new(move |i| {
                let p = Polynomial::monomial(field, Monomial::var_pow(1, i as u32));
                TowerElement::from_element(vec![p], r.clone())
            }),
            Arc::new(|j| Some(j + 1)),
        )
    }

    pub fn module(&self) -> &Arc<ModulePresentation> {
        &self.module
    }

    /// The same terms under a different declared bound; certificates are not shared.
    pub fn with_bound(&self, bound: SupportBound) -> DecayStream {
        DecayStream {
            module: self.module.clone(),
            terms: self.terms.clone(),
            bound,
            memo: self.memo.clone(),
            supports: Arc::new(Mutex::new(BTreeMap::new())),
        }
    }

    pub fn declared_bound(&self, threshold: usize) -> Option<usize> {
        (self.bound)(threshold)
    }

    pub fn term(&self, z: usize) -> Result<TowerElement> {
        if let Some(t) = self.memo.lock().unwrap().get(&z) {
            return Ok(t.clone());
        }
        let t = (self.terms)(z)?;
        if **t.module() != *self.module {
            return Err(Error::ModuleMismatch);
        }
        self.memo.lock().unwrap().insert(z, t.clone());
        Ok(t)
    }

    /// Whether `ord(f(z)) > i`.
    pub fn vanishes_at(&self, z: usize, i: usize) -> Result<bool> {
        self.term(z)?.vanishes_at(i)
    }

    /// Verifies the declared bounds for thresholds `0..=cap`, probing the
    /// window `[N_i, max(cap, 1))` past each bound.
    pub fn check(&self, cap: usize) -> Result<DecayCertificate> {
        self.check_with_horizon(cap, cap.max(1))
    }

    pub fn check_with_horizon(&self, cap: usize, horizon: usize) -> Result<DecayCertificate> {
        let mut supports = Vec::with_capacity(cap + 1);
        for i in 0..=cap {
            if let Some(s) = self.supports.lock().unwrap().get(&i) {
                supports.push(s.clone());
                continue;
            }
            let n = self.declared_bound(i).unwrap_or(0);
            let mut support = Vec::new();
            for z in 0..n {
                if !self.vanishes_at(z, i)? {
                    support.push(z);
                }
            }
            let mut witnesses = Vec::new();
            for z in n..horizon.max(n) {
                if !self.vanishes_at(z, i)? {
                    witnesses.push(z);
                }
            }
            if !witnesses.is_empty() {
                return Err(Error::DecayFailure { threshold: i, witnesses });
            }
            self.supports.lock().unwrap().insert(i, support.clone());
            supports.push(support);
        }
        Ok(DecayCertificate { cap, supports })
    }

    /// `{ z : ord(f(z)) <= i }`, certifying thresholds up to `i` first.
    pub fn support(&self, i: usize) -> Result<Vec<usize>> {
        Ok(self.check(i)?.supports.pop().expect("threshold i certified"))
    }

    /// Bound used when summing at level `i`.
    fn summation_bound(&self, i: usize) -> usize {
        self.declared_bound(i).unwrap_or(0)
    }

    pub fn add(&self, other: &DecayStream) -> Result<DecayStream> {
        if *self.module != *other.module {
            return Err(Error::ModuleMismatch);
        }
        let (a, b) = (self.clone(), other.clone());
        let (ba, bb) = (self.bound.clone(), other.bound.clone());
        Ok(DecayStream::new(
            self.module.clone(),
            Arc::new(move |z| a.term(z)?.add(&b.term(z)?)),
            Arc::new(move |i| Some(ba(i)?.max(bb(i)?))),
        ))
    }

    pub fn scale(&self, c: &Polynomial) -> DecayStream {
        let (a, c) = (self.clone(), c.clone());
        DecayStream::new(self.module.clone(), Arc::new(move |z| Ok(a.term(z)?.scale(&c))), self.bound.clone())
    }

    /// Termwise `g(z) * f(z)` for a ring stream `g`; decays with `g`.
    pub fn times_family(g: &DecayStream, module: Arc<ModulePresentation>, family: TermOracle) -> DecayStream {
        let g2 = g.clone();
        DecayStream::new(module, Arc::new(move |z| family(z)?.scale_by_tower(&g2.term(z)?)), g.bound.clone())
    }

    /// Whether both streams have equal threshold supports and equal
    /// truncated terms at every level `<= cap`.
    pub fn agrees_with(&self, other: &DecayStream, cap: usize) -> Result<bool> {
        let (a, b) = (self.check(cap)?, other.check(cap)?);
        if a.supports != b.supports {
            return Ok(false);
        }
        for (i, support) in a.supports.iter().enumerate() {
            for &z in support {
                let d = self.term(z)?.sub(&other.term(z)?)?;
                if !d.vanishes_at(i)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Checks the declared support bounds of `f` for thresholds `0..=cap`.
pub fn decay_check(f: &DecayStream, cap: usize) -> Result<DecayCertificate> {
    f.check(cap)
}

/// `sum_z f(z)` up to level `cap`: level `i` adds the level-`i` truncations
/// of the terms below `N_i`. Deeper levels report [`Error::LevelBeyondCap`].
pub fn series_sum(f: &DecayStream, cap: usize) -> Result<TowerElement> {
    f.check(cap)?;
    let g = f.clone();
    let module = f.module.clone();
    let (field, rank) = (module.field(), module.rank());
    Ok(TowerElement::from_oracle(
        module,
        Arc::new(move |i| {
            if i > cap {
                return Err(Error::LevelBeyondCap { level: i, cap });
            }
            let mut acc = zero_vec(field, rank);
            for z in 0..g.summation_bound(i) {
                acc = vec_add(&acc, &g.term(z)?.project(i)?.coords);
            }
            Ok(acc)
        }),
    ))
}

/// `phi(g) = sum_z g(z) f(z)` for a decaying ring stream `g`.
pub fn hom_apply(
    g: &DecayStream,
    module: Arc<ModulePresentation>,
    family: TermOracle,
    cap: usize,
) -> Result<TowerElement> {
    if g.module.rank() != 1 || !g.module.is_free() || g.module.ideal() != module.ideal() {
        return Err(Error::ModuleMismatch);
    }
    series_sum(&DecayStream::times_family(g, module, family), cap)
}

/// `<f, g> = sum_z f(z) g(z)`.
pub fn pairing(f: &PolyFamily, g: &DecayStream, cap: usize) -> Result<TowerElement> {
    let (f2, g2) = (f.clone(), g.clone());
    let product = DecayStream::new(g.module.clone(), Arc::new(move |z| Ok(g2.term(z)?.scale(&f2(z)))), g.bound.clone());
    series_sum(&product, cap)
}

/// `h^* f = f . h`.
pub fn pullback(h: &IndexMap, f: &PolyFamily) -> PolyFamily {
    let (h, f) = (h.clone(), f.clone());
    Arc::new(move |z| f(h(z)))
}

/// `h_* g (z) = sum_{h(y) = z} g(y)`, evaluated at levels `<= cap` over
/// the threshold supports of `g`.
pub fn pushforward(h: &IndexMap, g: &DecayStream, cap: usize) -> Result<DecayStream> {
    let cert = g.check(cap)?;
    let bounds: Vec<usize> = (0..=cap).map(|i| g.summation_bound(i)).collect();
    let images: Vec<usize> = bounds.iter().map(|&n| (0..n).map(|y| h(y) + 1).max().unwrap_or(0)).collect();
    debug_assert_eq!(cert.supports.len(), cap + 1);
    let module = g.module.clone();
    let (field, rank) = (module.field(), module.rank());
    let (h2, g2, m2) = (h.clone(), g.clone(), module.clone());
    let bounds = Arc::new(bounds);
    Ok(DecayStream::new(
        module,
        Arc::new(move |z| {
            let (h, g, bounds) = (h2.clone(), g2.clone(), bounds.clone());
            Ok(TowerElement::from_oracle(
                m2.clone(),
                Arc::new(move |i| {
                    if i > cap {
                        return Err(Error::LevelBeyondCap { level: i, cap });
                    }
                    let mut acc = zero_vec(field, rank);
                    for y in (0..bounds[i]).filter(|&y| h(y) == z) {
                        acc = vec_add(&acc, &g.term(y)?.project(i)?.coords);
                    }
                    Ok(acc)
                }),
            ))
        }),
        Arc::new(move |i| images.get(i).copied()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn q(s: &str) -> Polynomial {
        parse_poly(s, Field::Rational).unwrap()
    }

    fn ring(ideal: AdicIdeal) -> Arc<ModulePresentation> {
        ring_of(Field::Rational, ideal)
    }

    #[test]
    fn bseries_supports() {
        let b = DecayStream::bseries(Field::Rational);
        let cert = b.check(8).unwrap();
        for i in 0..=8 {
            assert_eq!(cert.supports[i], (1..=i).collect::<Vec<_>>());
        }
        let s = series_sum(&b, 8).unwrap();
        assert_eq!(s.project(3).unwrap().coords[0], q("t1 + t2^2 + t3^3"));
        assert!(s.vanishes_at(0).unwrap());
        assert!(matches!(s.project(9), Err(Error::LevelBeyondCap { level: 9, cap: 8 })));
    }

    #[test]
    fn constant_stream_fails_at_threshold_zero() {
        let r = ring(AdicIdeal::vars([1]));
        let one = TowerElement::from_element(vec![q("1")], r.clone()).unwrap();
        let s = DecayStream::new(r, Arc::new(move |_| Ok(one.clone())), Arc::new(|_| None));
        match s.check(8) {
            Err(Error::DecayFailure { threshold: 0, witnesses }) => {
                assert_eq!(witnesses, (0..8).collect::<Vec<_>>())
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn geometric_sum() {
        let g = DecayStream::geom(Field::Rational);
        let s = series_sum(&g, 4).unwrap();
        assert_eq!(s.project(2).unwrap().coords[0], q("1 + t1 + t1^2"));
        let empty = DecayStream::zero(g.module().clone());
        assert!(series_sum(&empty, 4).unwrap().project(4).unwrap().is_zero_vector());
    }

    #[test]
    fn hom_apply_on_delta() {
        let r = ring(AdicIdeal::vars([1]));
        let family: TermOracle = {
            let r = r.clone();
            Arc::new(move |z| TowerElement::from_element(vec![q("1 + t1").pow(z as u32)], r.clone()))
        };
        let x = hom_apply(&DecayStream::delta(r.clone(), 3), r.clone(), family.clone(), 5).unwrap();
        assert_eq!(x.project(5).unwrap().coords[0], q("(1 + t1)^3"));
        let zero = hom_apply(&DecayStream::zero(r.clone()), r, family, 5).unwrap();
        assert!(zero.project(5).unwrap().is_zero_vector());
    }

    #[test]
    fn pushforward_to_a_point_is_the_sum() {
        let g = DecayStream::geom(Field::Rational);
        let h: IndexMap = Arc::new(|_| 0);
        let pushed = pushforward(&h, &g, 5).unwrap();
        let total = series_sum(&g, 5).unwrap();
        assert!(crate::tower::towers_agree(&pushed.term(0).unwrap(), &total, 5).unwrap());
        assert!(pushed.term(1).unwrap().vanishes_at(5).unwrap());
    }

    #[test]
    fn pairing_with_delta() {
        let r = ring(AdicIdeal::vars([1]));
        let one: PolyFamily = Arc::new(|_| q("1"));
        let p = pairing(&one, &DecayStream::delta(r, 4), 3).unwrap();
        assert_eq!(p.project(3).unwrap().coords[0], q("1"));
    }
}
