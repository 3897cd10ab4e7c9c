//! Restricted power series `A{x_1..x_n}` as decaying functions on `N^n`,
//! with `A = Q[t1]`, `a = (t1)` and `x_j` written `t_{1+j}`.

use std::sync::Arc;

use super::GalleryReport;
use crate::decay::{DecayStream, TupleIndex};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::ideal::AdicIdeal;
use crate::poly::{Monomial, Polynomial};
use crate::random;
use crate::tower::TowerElement;
use crate::truncate::ModulePresentation;

type Coefficients = Arc<dyn Fn(&[usize]) -> Polynomial + Send + Sync>;
type DegreeBound = Arc<dyn Fn(usize) -> usize + Send + Sync>;

/// A coefficient function on `N^n` whose coefficients at `|alpha| > D(i)`
/// vanish modulo `a^{i+1}`.
#[derive(Clone)]
struct Series {
    index: TupleIndex,
    coeff: Coefficients,
    degree: DegreeBound,
}

fn field() -> Field {
    Field::Rational
}

fn t1_pow(k: usize) -> Polynomial {
    Polynomial::monomial(field(), Monomial::var_pow(1, k as u32))
}

/// Every `beta <= alpha` componentwise.
fn below(alpha: &[usize]) -> Vec<Vec<usize>> {
    alpha.iter().fold(vec![Vec::new()], |acc, &a| {
        acc.into_iter()
            .flat_map(|prefix| {
                (0..=a).map(move |b| {
                    let mut p = prefix.clone();
                    p.push(b);
                    p
                })
            })
            .collect()
    })
}

impl Series {
    fn monomial(n: usize, alpha: Vec<usize>, c: Polynomial) -> Series {
        let size: usize = alpha.iter().sum();
        Series {
            index: TupleIndex::new(n),
            coeff: Arc::new(move |b| if b == alpha.as_slice() { c.clone() } else { Polynomial::zero(field()) }),
            degree: Arc::new(move |_| size),
        }
    }

    /// `sum_k t1^k x_1^k`.
    fn geometric(n: usize) -> Series {
        Series {
            index: TupleIndex::new(n),
            coeff: Arc::new(|a| if a[1..].iter().all(|&x| x == 0) { t1_pow(a[0]) } else { Polynomial::zero(field()) }),
            degree: Arc::new(|i| i),
        }
    }

    /// Coefficients `p_alpha(t1) t1^|alpha|` with `p_alpha` drawn from `seed`.
    fn sample(n: usize, seed: u64) -> Series {
        let index = TupleIndex::new(n);
        let idx = index;
        Series {
            index,
            coeff: Arc::new(move |a| {
                let mut g = random::derive(seed, idx.encode(a) as u64);
                random::poly(&mut g, field(), &[1], 2, 3)
                    .mul_monomial(&Monomial::var_pow(1, a.iter().sum::<usize>() as u32))
            }),
            degree: Arc::new(|i| i),
        }
    }

    fn add(&self, other: &Series) -> Series {
        let (f, g) = (self.coeff.clone(), other.coeff.clone());
        let (df, dg) = (self.degree.clone(), other.degree.clone());
        Series {
            index: self.index,
            coeff: Arc::new(move |a| &f(a) + &g(a)),
            degree: Arc::new(move |i| df(i).max(dg(i))),
        }
    }

    /// The Cauchy product; nonzero at level `i` needs both factors nonzero.
    fn mul(&self, other: &Series) -> Series {
        let (f, g) = (self.coeff.clone(), other.coeff.clone());
        let (df, dg) = (self.degree.clone(), other.degree.clone());
        Series {
            index: self.index,
            coeff: Arc::new(move |a| {
                below(a).iter().fold(Polynomial::zero(field()), |acc, b| {
                    let rest: Vec<usize> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                    &acc + &(&f(b) * &g(&rest))
                })
            }),
            degree: Arc::new(move |i| df(i) + dg(i)),
        }
    }

    /// Number of tuples of total degree `<= d`.
    fn count(&self, d: usize) -> usize {
        let mut first = vec![0; self.index.arity()];
        first[self.index.arity() - 1] = d + 1;
        self.index.encode(&first)
    }

    fn to_stream(&self, ring: &Arc<ModulePresentation>) -> DecayStream {
        let (coeff, idx, r) = (self.coeff.clone(), self.index, ring.clone());
        let this = self.clone();
        DecayStream::new(
            ring.clone(),
            Arc::new(move |z| TowerElement::from_element(vec![coeff(&idx.decode(z))], r.clone())),
            Arc::new(move |i| Some(this.count((this.degree)(i)))),
        )
    }

    /// `sum_{|alpha| <= D(level)} c_alpha x^alpha`.
    fn polynomial(&self, level: usize) -> Polynomial {
        (0..self.count((self.degree)(level))).fold(Polynomial::zero(field()), |acc, z| {
            let alpha = self.index.decode(z);
            let x = Monomial::from_pairs(alpha.iter().enumerate().map(|(j, &e)| (j as u32 + 2, e as u32)));
            &acc + &(self.coeff)(&alpha).mul_monomial(&x)
        })
    }
}

fn same_polynomial(ring: &ModulePresentation, p: &Polynomial, q: &Polynomial, cap: usize) -> Result<bool> {
    ring.equal_at(&ring.truncate(std::slice::from_ref(p), cap)?, &ring.truncate(std::slice::from_ref(q), cap)?)
}

/// Truncated products of restricted series, computed as convolutions of
/// coefficient streams, against products of their level-`cap` polynomials.
pub fn verify_restricted_series(n: usize, cap: usize) -> Result<GalleryReport> {
    if n < 1 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let ring = Arc::new(ModulePresentation::ring(field(), AdicIdeal::vars([1])));
    let one = Polynomial::one(field());
    let mut report = GalleryReport::new("restricted", cap);

    let geo = Series::geometric(n);
    let mut e1 = vec![0; n];
    e1[0] = 1;
    let factor = Series::monomial(n, vec![0; n], one.clone()).add(&Series::monomial(n, e1.clone(), -&t1_pow(1)));
    let unit = Series::monomial(n, vec![0; n], one.clone());
    report.check(
        "geometric",
        geo.mul(&factor)
            .to_stream(&ring)
            .agrees_with(&unit.to_stream(&ring), cap)
            .map(|ok| (ok, format!("(sum t1^k x1^k)(1 - t1 x1) = 1 mod t1^{}", cap + 1))),
    );

    let h = Series::sample(n, 11);
    report.check(
        "delta0_identity",
        h.mul(&unit)
            .to_stream(&ring)
            .agrees_with(&h.to_stream(&ring), cap)
            .map(|ok| (ok, "h * delta_0 = h".to_string())),
    );

    let mut beta = vec![0; n];
    beta[n - 1] += 2;
    let alpha_beta: Vec<usize> = e1.iter().zip(&beta).map(|(a, b)| a + b).collect();
    let c = Polynomial::from_i64(field(), 3);
    let lhs = Series::monomial(n, e1, t1_pow(1)).mul(&Series::monomial(n, beta, c.clone()));
    let rhs = Series::monomial(n, alpha_beta.clone(), &c * &t1_pow(1));
    report.check(
        "monomials",
        lhs.to_stream(&ring)
            .agrees_with(&rhs.to_stream(&ring), cap)
            .map(|ok| (ok, format!("t1 x^e1 * 3 x^(2e{n}) = 3 t1 x^{alpha_beta:?}"))),
    );

    let (f, g) = (Series::sample(n, 21), Series::sample(n, 22));
    let fg = f.mul(&g);
    let outcome = (|| {
        let product = &f.polynomial(cap) * &g.polynomial(cap);
        let ok = same_polynomial(&ring, &fg.polynomial(cap), &product, cap)?;
        fg.to_stream(&ring).check(cap)?;
        Ok((
            ok,
            format!(
                "convolution = polynomial product mod t1^{} over {} coefficients",
                cap + 1,
                fg.count((fg.degree)(cap))
            ),
        ))
    })();
    report.check("convolution", outcome);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restricted_series_pass() {
        for n in 1..=2 {
            let r = verify_restricted_series(n, 4).unwrap();
            assert!(r.passed(), "{r}");
        }
        assert!(verify_restricted_series(0, 2).is_err());
    }

    #[test]
    fn tuple_counts() {
        let s = Series::geometric(2);
        assert_eq!(s.count(0), 1);
        assert_eq!(s.count(1), 3);
        assert_eq!(s.count(2), 6);
    }
}
