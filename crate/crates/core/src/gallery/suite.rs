//! Randomized structural checks over sampled instances. Instances depend on
//! the seed; every check is exact, so verdicts do not.

use std::sync::Arc;

use rand::Rng;

use super::GalleryReport;
use crate::decay::{from_level_stream, pairing, pullback, pushforward, to_level_stream, FinFn, IndexMap, PolyFamily};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::ideal::{AdicIdeal, OrderValue};
use crate::lift::{basis_lift, generates_level0, nakayama_lift};
use crate::poly::Polynomial;
use crate::random::{self, Rng64};
use crate::tower::{theorem6_check, towers_agree, TowerElement, WitnessStrategy};
use crate::truncate::ModulePresentation;

const VARS: [u32; 2] = [1, 2];

fn field() -> Field {
    Field::Rational
}

fn ideal() -> AdicIdeal {
    AdicIdeal::vars(VARS)
}

fn ring() -> Arc<ModulePresentation> {
    Arc::new(ModulePresentation::ring(field(), ideal()))
}

/// A vector whose constant parts are drawn from `{0, 1}`.
fn element(g: &mut Rng64, rank: usize) -> Vec<Polynomial> {
    (0..rank)
        .map(|_| {
            let c = Polynomial::from_i64(field(), i64::from(g.gen_bool(0.5)));
            &c + &random::poly(g, field(), &VARS, 2, 2).filter_terms(|m| !m.is_one())
        })
        .collect()
}

fn summary(ok: usize, total: usize, what: &str) -> (bool, String) {
    (ok == total, format!("{ok}/{total} {what}"))
}

/// `ord'` of `tau(f)` equals the ring order `ord_a(f)` for a finitely
/// generated ideal, so the two metrics coincide.
pub(super) fn cor18(cap: usize, seed: u64) -> Result<GalleryReport> {
    let mut report = GalleryReport::new("cor18", cap);
    let ring = ring();
    let mut agree = 0;
    let total = 20;
    for k in 0..total {
        let mut g = random::derive(seed, k);
        let degree = g.gen_range(0..=cap);
        let shift = random::monomial(&mut g, &VARS, degree);
        let f = random::poly(&mut g, field(), &VARS, 2, 3).mul_monomial(&shift);
        let t = TowerElement::from_element(vec![f.clone()], ring.clone())?;
        let ord = t.ord_prime(cap)?;
        let (lo, hi) = t.ord_adic_bounds(cap, WitnessStrategy::None)?;
        let expected = match ideal().ord_ring(&f, cap) {
            OrderValue::Finite(o) if o <= cap => OrderValue::Finite(o),
            _ => OrderValue::AtLeast(cap + 1),
        };
        if ord == expected && lo == ord && hi == ord {
            agree += 1;
        }
    }
    let (ok, w) = summary(agree, total as usize, "samples with ord' = ord_a");
    report.claim("metrics", ok, w);
    Ok(report)
}

/// The finite-level completeness criterion on sampled presentations over
/// `Q[t1, t2]`, with the bijectivity of `tau_{M,i}`.
pub(super) fn thm6(cap: usize, seed: u64) -> Result<GalleryReport> {
    let mut report = GalleryReport::new("thm6", cap);
    let top = cap.min(4);
    let mut bijective = 0;
    let total = 12;
    for k in 0..total {
        let mut g = random::derive(seed ^ 0x6, k);
        let m = random::presentation(&mut g, field(), &VARS, 2, 2, 2);
        let mut failure = None;
        let mut all_bijective = true;
        for level in 0..=top {
            let r = theorem6_check(&m, level, 1)?;
            all_bijective &= r.tau_bijective;
            if !r.passed() && failure.is_none() {
                failure = Some(format!("level {level}: {}", r.witness.unwrap_or_default()));
            }
        }
        bijective += usize::from(all_bijective);
        match failure {
            None => report.claim(
                &format!("m{k}"),
                true,
                format!("rank {}, {} relations, levels 0..={top}", m.rank(), m.relations().len()),
            ),
            Some(w) => report.claim(&format!("m{k}"), false, w),
        }
    }
    let (ok, w) = summary(bijective, total as usize, "presentations with tau_M,i bijective");
    report.claim("idempotence", ok, w);
    Ok(report)
}

/// Decaying streams survive the trip through coherent level streams.
pub(super) fn thm7(cap: usize, seed: u64) -> Result<GalleryReport> {
    let mut report = GalleryReport::new("thm7", cap);
    let total = 10;
    let mut ok = 0;
    for k in 0..total {
        let s = random::decaying_stream(field(), &VARS, seed.wrapping_add(k), (k % 3) as usize);
        let levels = to_level_stream(&s, cap)?;
        let back = from_level_stream(&levels, cap)?;
        let mut same = back.agrees_with(&s, cap)?;
        let again = to_level_stream(&back, cap)?;
        for i in 0..=cap {
            same &= again.level(i)?.equals(s.module(), &levels.level(i)?)?;
        }
        ok += usize::from(same);
    }
    let (passed, w) = summary(ok, total as usize, "round trips exact at levels <= cap");
    report.claim("round_trip", passed, w);
    Ok(report)
}

/// Level-0 generation holds exactly when every generator and a sample
/// element lift, with zero residuals at every level.
pub(super) fn thm8(cap: usize, seed: u64) -> Result<GalleryReport> {
    let mut report = GalleryReport::new("thm8", cap);
    let depth = cap.min(6);
    let total = 10;
    let mut ok = 0;
    let (mut generating, mut lifted) = (0, 0);
    for k in 0..total {
        let mut g = random::derive(seed ^ 0x8, k);
        let m = Arc::new(random::presentation(&mut g, field(), &VARS, 2, 2, 2));
        let size = g.gen_range(1..=3);
        let family: Vec<TowerElement> = (0..size)
            .map(|_| TowerElement::from_element(element(&mut g, m.rank()), m.clone()))
            .collect::<Result<_>>()?;
        let mut targets: Vec<Vec<Polynomial>> = (0..m.rank()).map(|j| m.generator(j, 0).coords).collect();
        targets.push(element(&mut g, m.rank()));
        let gens = generates_level0(&m, &family)?;
        let mut all = true;
        for t in targets {
            let tower = TowerElement::from_element(t, m.clone())?;
            all &= match nakayama_lift(&tower, &family, depth) {
                Ok(l) => l.succeeded(),
                Err(Error::NotGenerating { .. }) => false,
                Err(e) => return Err(e),
            };
        }
        generating += usize::from(gens);
        lifted += usize::from(all);
        ok += usize::from(gens == all);
    }
    let (passed, w) = summary(ok, total as usize, "instances where generation <=> lifting");
    report.claim("equivalence", passed, format!("{w} ({generating} generating, {lifted} lifted)"));
    Ok(report)
}

/// Finite-support functions into `M_i` are recovered from the level stream
/// of their lift.
pub(super) fn thm2(cap: usize, seed: u64) -> Result<GalleryReport> {
    let mut report = GalleryReport::new("thm2", cap);
    let total = 5;
    let mut ok = 0;
    for k in 0..total {
        let mut g = random::derive(seed ^ 0x2, k);
        let m = Arc::new(random::presentation(&mut g, field(), &VARS, 2, 1, 2));
        let level = g.gen_range(0..=cap);
        let entries = (0..3)
            .map(|_| {
                let z = g.gen_range(0..6);
                let v = random::poly(&mut g, field(), &VARS, level, 3);
                let mut coords = vec![Polynomial::zero(field()); m.rank()];
                coords[0] = v;
                Ok((z, m.truncate(&coords, level)?))
            })
            .collect::<Result<_>>()?;
        let fin = FinFn::new(&m, level, entries)?;
        let levels = to_level_stream(&fin.lift(m.clone())?, cap)?;
        let mut same = true;
        for j in 0..=level {
            same &= levels.level(j)?.equals(&m, &fin.project(&m, j)?)?;
        }
        ok += usize::from(same);
    }
    let (passed, w) = summary(ok, total as usize, "finite functions recovered at every level");
    report.claim("truncation", passed, w);
    Ok(report)
}

pub(super) fn basis_lifts(cap: usize, seed: u64) -> Result<GalleryReport> {
    let mut report = GalleryReport::new("basis_lift", cap);
    let top = cap.min(4);
    for k in 0..3u64 {
        let mut g = random::derive(seed ^ 0xb, k);
        let n = 1 + k as usize;
        let flat = random::flat_system(&mut g, field(), &VARS, n, top, None);
        report.check(
            &format!("flat{k}"),
            basis_lift(&flat, top).map(|b| {
                (
                    b.rank == n && b.checks.len() == top + 1,
                    format!("rank {n} basis, inverse verified at levels 0..={top}"),
                )
            }),
        );
        let j = 1 + k as usize % top;
        let bad = random::flat_system(&mut g, field(), &VARS, n, top, Some(j));
        let outcome = match basis_lift(&bad, top) {
            Err(Error::NotFlat { level, relation }) => {
                Ok((level == j, format!("NotFlat at level {level}: {relation}")))
            }
            Err(e) => Err(e),
            Ok(_) => Ok((false, format!("injected relation at level {j} was accepted"))),
        };
        report.check(&format!("injected{k}"), outcome);
    }
    Ok(report)
}

fn sum_family(a: &PolyFamily, b: &PolyFamily) -> PolyFamily {
    let (a, b) = (a.clone(), b.clone());
    Arc::new(move |z| &a(z) + &b(z))
}

fn compose(h2: &IndexMap, h1: &IndexMap) -> IndexMap {
    let (h1, h2) = (h1.clone(), h2.clone());
    Arc::new(move |z| h2(h1(z)))
}

/// Bilinearity of the pairing, the pushforward-pullback adjunction, and
/// functoriality of pushforward.
pub(super) fn remark3(cap: usize, seed: u64) -> Result<GalleryReport> {
    let mut report = GalleryReport::new("remark3", cap);
    let depth = cap.min(4);
    let total = 5;
    let (mut bilinear, mut adjoint, mut functorial) = (0, 0, 0);
    for k in 0..total {
        let mut g = random::derive(seed ^ 0x3, k);
        let seeds: [u64; 4] = g.gen();
        let s1 = random::decaying_stream(field(), &VARS, seeds[0], (seeds[2] % 3) as usize);
        let s2 = random::decaying_stream(field(), &VARS, seeds[1], (seeds[3] % 3) as usize);
        let (f1, f2) = (random::poly_family(field(), &VARS, seeds[2]), random::poly_family(field(), &VARS, seeds[3]));
        let (h1, h2) = (random::index_map(&mut g), random::index_map(&mut g));

        let left = pairing(&sum_family(&f1, &f2), &s1, depth)?;
        let right = pairing(&f1, &s1, depth)?.add(&pairing(&f2, &s1, depth)?)?;
        let mut ok = towers_agree(&left, &right, depth)?;
        let left = pairing(&f1, &s1.add(&s2)?, depth)?;
        let right = pairing(&f1, &s1, depth)?.add(&pairing(&f1, &s2, depth)?)?;
        ok &= towers_agree(&left, &right, depth)?;
        bilinear += usize::from(ok);

        let push = pairing(&f1, &pushforward(&h1, &s1, depth)?, depth)?;
        let pull = pairing(&pullback(&h1, &f1), &s1, depth)?;
        adjoint += usize::from(towers_agree(&push, &pull, depth)?);

        let once = pushforward(&compose(&h2, &h1), &s1, depth)?;
        let twice = pushforward(&h2, &pushforward(&h1, &s1, depth)?, depth)?;
        functorial += usize::from(once.agrees_with(&twice, depth)?);
    }
    let total = total as usize;
    let (ok, w) = summary(bilinear, total, "instances bilinear");
    report.claim("bilinear", ok, w);
    let (ok, w) = summary(adjoint, total, "instances with <f, h_* g> = <h^* f, g>");
    report.claim("adjunction", ok, w);
    let (ok, w) = summary(functorial, total, "instances with (h2 h1)_* = h2_* h1_*");
    report.claim("functorial", ok, w);
    Ok(report)
}
