//! The non-complete completion, the non-closed image, and the vanishing
//! completion of a localization.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::GalleryReport;
use crate::decay::{series_sum, DecayStream};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::ideal::{AdicIdeal, DyadicDistance, OrderValue};
use crate::linalg;
use crate::poly::{Monomial, Polynomial};
use crate::tower::{TowerElement, WitnessStrategy};
use crate::truncate::ModulePresentation;

/// `b = sum_k t_k^k` over `a = (t1, t2, ...)`: for each `n <= n_max`,
/// killing `t1..tn` in `pi_cap(b)` leaves a nonconstant term, which refutes
/// `b = lambda + sum_{k <= n} t_k b_k`.
pub fn verify_example7(n_max: usize, cap: usize) -> Result<GalleryReport> {
    if n_max < 1 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    if cap < n_max + 1 {
        return Err(Error::CapTooSmall { cap, required: n_max + 1 });
    }
    let b = series_sum(&DecayStream::bseries(Field::Rational), cap)?;
    let top = b.project(cap)?.coords.remove(0);
    let mut report = GalleryReport::new("example7", cap);
    let mut refuted = true;
    for n in 1..=n_max {
        let kill: BTreeSet<u32> = (1..=n as u32).collect();
        let survivor = top
            .substitute_zero(&kill)
            .terms()
            .filter(|(m, _)| !m.is_one())
            .min_by(|x, y| x.0.cmp(y.0))
            .map(|(m, c)| Polynomial::term(c.clone(), m.clone()));
        refuted &= survivor.is_some();
        let killed = if n == 1 { "t1".to_string() } else { format!("t1..t{n}") };
        match survivor {
            Some(w) => report.claim(&format!("refute_n{n}"), true, format!("{w} survives killing {killed}")),
            None => report.claim(&format!("refute_n{n}"), false, format!("killing {killed} leaves a constant")),
        }
    }
    let zero = TowerElement::zero(b.module().clone());
    report.check(
        "dist_prime",
        b.dist_prime(&zero, cap).map(|d| (d == DyadicDistance::Pow(1), format!("dist'(b, 0) = {d}"))),
    );
    report.check(
        "ord_adic",
        b.ord_adic_bounds(cap, WitnessStrategy::SubstitutionKill { max_kill: n_max }).map(|(lo, hi)| {
            let exact = lo == OrderValue::Finite(0) && hi == OrderValue::Finite(0);
            (exact, format!("ord_adic(b) in [{lo}, {hi}], dist(b, 0) = {}", hi.distance()))
        }),
    );
    report.claim(
        "tau0",
        refuted,
        if refuted {
            format!("b-bar not in Im(tau_M,0): refuted for every n <= {n_max}")
        } else {
            "some decomposition was not refuted".into()
        },
    );
    Ok(report)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Example5Options {
    /// Declared support bound for the forced preimage; `None` declares none.
    /// Setting it to `Some(cap)` injects a false decay certificate.
    pub forced_bound: Option<usize>,
}

fn ring_t() -> Arc<ModulePresentation> {
    Arc::new(ModulePresentation::ring(Field::Rational, AdicIdeal::vars([1])))
}

fn t_pow(i: usize) -> Polynomial {
    Polynomial::monomial(Field::Rational, Monomial::var_pow(1, i as u32))
}

/// `phi(g)(i) = t^i g(i)` on `F_dec(N, A^)`, `A = Q[t]`.
fn phi(g: &DecayStream) -> DecayStream {
    let g2 = g.clone();
    let bound = Arc::new({
        let g = g.clone();
        move |i| g.declared_bound(i)
    });
    DecayStream::new(g.module().clone(), Arc::new(move |z| Ok(g2.term(z)?.scale(&t_pow(z)))), bound)
}

/// `phi(delta_i) = t^i delta_i`: `f = sum_i t^i delta_i` lies in the closure
/// of the image but its only candidate preimage, the constant 1, does not decay.
pub fn verify_example5(cap: usize, options: Example5Options) -> Result<GalleryReport> {
    if cap < 2 {
        return Err(Error::CapTooSmall { cap, required: 2 });
    }
    let field = Field::Rational;
    let ring = ring_t();
    let f = DecayStream::geom(field);
    let one = TowerElement::from_element(vec![Polynomial::one(field)], ring.clone())?;
    let mut report = GalleryReport::new("example5", cap);

    let mut closure = true;
    for j in 0..=cap {
        let outcome = (|| {
            let g = DecayStream::finite(ring.clone(), (0..=j).map(|i| (i, one.clone())).collect())?;
            let diff = phi(&g).add(&f.scale(&Polynomial::from_i64(field, -1)))?;
            let support = diff.support(j)?;
            Ok((support.is_empty(), format!("phi(g_{j}) - f has empty support at threshold {j}")))
        })();
        closure &= matches!(outcome, Ok((true, _)));
        report.check(&format!("approx_g{j}"), outcome);
    }

    let mut forced = true;
    for i in 0..=cap {
        let outcome = (|| {
            for j in i..=cap {
                let ti = ring.truncate(&[t_pow(i)], j)?;
                let Some(space) = ring.solution_space(&ti, std::slice::from_ref(&ti))? else {
                    return Ok((false, format!("t^{i} c = t^{i} has no solution mod t^{}", j + 1)));
                };
                let d = j - i;
                let off = &space.particular[0] - &Polynomial::one(field);
                if !ring.truncate(&[off], d)?.is_zero_vector() {
                    return Ok((
                        false,
                        format!("particular solution {} is not 1 mod t^{}", space.particular[0], d + 1),
                    ));
                }
                if let Some(k) = space.kernel.iter().find(|k| !ring.truncate(k, d).is_ok_and(|v| v.is_zero_vector())) {
                    return Ok((false, format!("homogeneous solution {} is not 0 mod t^{}", k[0], d + 1)));
                }
            }
            Ok((true, format!("g({i}) = 1 mod t^(j+1-{i}) for all {i} <= j <= {cap}")))
        })();
        forced &= matches!(outcome, Ok((true, _)));
        report.check(&format!("forced_c{i}"), outcome);
    }

    let bound = options.forced_bound;
    let o = one.clone();
    let preimage = DecayStream::new(ring.clone(), Arc::new(move |_| Ok(o.clone())), Arc::new(move |_| bound));
    let not_decaying = match preimage.check(cap) {
        Err(Error::DecayFailure { threshold: 0, witnesses }) if witnesses.len() == cap => {
            report.claim(
                "forced_not_decaying",
                true,
                format!("threshold 0: g(z) = 1 for z in 0..{cap}, prefix of length {}", witnesses.len()),
            );
            true
        }
        Err(e) => {
            report.claim("forced_not_decaying", false, format!("unexpected outcome: {e}"));
            false
        }
        Ok(cert) => {
            let n = cert.supports.first().map_or(0, Vec::len);
            report.claim(
                "forced_not_decaying",
                false,
                format!("decay check accepted the constant 1 with {n} support points at threshold 0"),
            );
            false
        }
    };

    // phi is injective on inputs supported in [0, s] of degree <= d, s + d <= cap.
    let (s, d) = (cap / 2, cap - cap / 2);
    let width = cap + 1;
    let mut columns: Vec<linalg::Vector> = Vec::new();
    for i in 0..=s {
        for e in 0..=d {
            let input = DecayStream::single(i, TowerElement::from_element(vec![t_pow(e)], ring.clone())?);
            let image = phi(&input).term(i)?.project(cap)?.coords.remove(0);
            let mut v = linalg::zero_vector(field, (s + 1) * width);
            for (m, c) in image.terms() {
                v[i * width + m.degree() as usize] = c.clone();
            }
            columns.push(v);
        }
    }
    let r = linalg::rank(&columns, (s + 1) * width);
    report.claim("phi_injective", r == columns.len(), format!("rank {r} of {} inputs at level {cap}", columns.len()));

    report.claim(
        "closure_not_image",
        closure && forced && not_decaying,
        format!("f in closure(Im phi) \\ Im phi up to level {cap}"),
    );
    Ok(report)
}

/// `K = A_t` for `A = Q[t]`: every truncation `A_i ⊗ K` vanishes because
/// `1 = t^{i+1} t^{-(i+1)}`, so the completion of `A -> K` is not injective.
pub fn verify_example6(cap: usize) -> Result<GalleryReport> {
    if cap < 1 {
        return Err(Error::CapTooSmall { cap, required: 1 });
    }
    let field = Field::Rational;
    let ring = ring_t();
    let ideal = ring.ideal().clone();
    let mut report = GalleryReport::new("example6", cap);
    let mut all_zero = true;
    for i in 0..=cap {
        // A Laurent monomial t^e is stored by its exponent.
        let (num, den) = ((i + 1) as i64, -((i + 1) as i64));
        let in_power = ideal.a_degree(&Monomial::var_pow(1, (i + 1) as u32)) as usize > i;
        let ok = num + den == 0 && in_power;
        all_zero &= ok;
        report.claim(&format!("laurent_level{i}"), ok, format!("1 = t^{} * t^{den} in a^{} K", i + 1, i + 1));
    }
    let tau_one = TowerElement::from_element(vec![Polynomial::one(field)], ring.clone())?;
    report.check(
        "completion_not_injective",
        tau_one.ord_prime(cap).map(|o| {
            (o == OrderValue::Finite(0) && all_zero, format!("tau(1) has ord' {o} in A^ but maps to 0 in K^"))
        }),
    );
    for i in 0..=cap {
        let outcome = (|| {
            let one = ring.generator(0, i);
            let gen = ring.truncate(&[t_pow(i + 1)], i)?;
            let solvable = ring.module_solve(&one, &[gen])?.is_some();
            Ok((!solvable, format!("1 not in t^{} A, so A_{i} != 0", i + 1)))
        })();
        report.check(&format!("control_A_level{i}"), outcome);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refutation_minimal_and_witness() {
        assert!(verify_example7(1, 2).unwrap().passed());
        let r = verify_example7(6, 8).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.get("example7.refute_n6").unwrap().witness.starts_with("t7^7"));
        assert!(matches!(verify_example7(1, 0), Err(Error::CapTooSmall { .. })));
    }

    #[test]
    fn closure_not_image_and_mutation() {
        assert!(verify_example5(2, Example5Options::default()).unwrap().passed());
        let bad = verify_example5(4, Example5Options { forced_bound: Some(4) }).unwrap();
        assert!(!bad.get("example5.forced_not_decaying").unwrap().passed);
        assert!(!bad.passed());
    }

    #[test]
    fn localization_small() {
        let r = verify_example6(1).unwrap();
        assert!(r.passed(), "{r}");
    }
}
