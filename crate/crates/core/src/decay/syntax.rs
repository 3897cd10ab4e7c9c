//! Text syntax for ring streams.
//!
//! ```text
//! spec    := '@bseries' | '@geom' | 'stream'? name ('>=' nat)? ':' expr
//! expr    := term (('+'|'-') term)*
//! term    := '-'? factor ('*' factor)*
//! factor  := base ('^' exp)?
//! exp     := nat | name | '(' iexpr ')'
//! base    := coeff | var | 't' '[' iexpr ']' | 'delta' '(' iexpr ')' | '(' expr ')'
//! iexpr   := iterm ('+' iterm)*
//! iterm   := nat ('*' name)? | name
//! ```
//!
//! `delta(e)` is 1 at indices `k` with `k = e(k)` and 0 elsewhere. Terms
//! below the start index are zero.

use std::fmt;
use std::sync::Arc;

use super::DecayStream;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::ideal::{AdicIdeal, VariableSet};
use crate::poly::{coefficient, Monomial, Parser, Polynomial};
use crate::tower::TowerElement;
use crate::truncate::ModulePresentation;

/// `slope * k + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Affine {
    slope: u32,
    offset: u32,
}

impl Affine {
    fn constant(offset: u32) -> Affine {
        Affine { slope: 0, offset }
    }

    fn at(self, k: usize) -> Result<u32> {
        (self.slope as usize)
            .checked_mul(k)
            .and_then(|x| x.checked_add(self.offset as usize))
            .and_then(|x| u32::try_from(x).ok())
            .ok_or_else(|| Error::Oracle(format!("index expression overflows at k = {k}")))
    }
}

#[derive(Clone, Debug)]
enum SExpr {
    Poly(Polynomial),
    Var(Affine),
    Delta(Affine),
    Add(Box<SExpr>, Box<SExpr>),
    Sub(Box<SExpr>, Box<SExpr>),
    Neg(Box<SExpr>),
    Mul(Box<SExpr>, Box<SExpr>),
    Pow(Box<SExpr>, Affine),
}

/// Lower bound on the order of the `k`-th term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum OrdBound {
    /// The term is zero for every `k >= n`.
    Vanishes(usize),
    /// `ord >= slope * k + offset` for every `k >= from`.
    Affine { slope: usize, offset: usize, from: usize },
}

use OrdBound::{Affine as Lin, Vanishes};

fn ord_constant(p: &Polynomial, ideal: &AdicIdeal) -> OrdBound {
    if p.is_zero() {
        return Vanishes(0);
    }
    let offset = ideal.ord_ring(p, 8).floor().unwrap_or(0);
    Lin { slope: 0, offset, from: 0 }
}

fn ord_sum(a: OrdBound, b: OrdBound) -> OrdBound {
    match (a, b) {
        (Vanishes(n), Vanishes(m)) => Vanishes(n.max(m)),
        (Vanishes(n), Lin { slope, offset, from }) | (Lin { slope, offset, from }, Vanishes(n)) => {
            Lin { slope, offset, from: from.max(n) }
        }
        (Lin { slope: s1, offset: o1, from: f1 }, Lin { slope: s2, offset: o2, from: f2 }) => {
            Lin { slope: s1.min(s2), offset: o1.min(o2), from: f1.max(f2) }
        }
    }
}

fn ord_product(a: OrdBound, b: OrdBound) -> OrdBound {
    match (a, b) {
        (Vanishes(n), Vanishes(m)) => Vanishes(n.min(m)),
        (Vanishes(n), _) | (_, Vanishes(n)) => Vanishes(n),
        (Lin { slope: s1, offset: o1, from: f1 }, Lin { slope: s2, offset: o2, from: f2 }) => {
            Lin { slope: s1 + s2, offset: o1 + o2, from: f1.max(f2) }
        }
    }
}

fn ord_power(base: OrdBound, e: Affine) -> OrdBound {
    let (a, b) = (e.slope as usize, e.offset as usize);
    match base {
        _ if a == 0 && b == 0 => Lin { slope: 0, offset: 0, from: 0 },
        Vanishes(n) if b == 0 => Vanishes(n.max(1)),
        Vanishes(n) => Vanishes(n),
        // (s k + o)(a k + b) >= (s a + s b + o a) k + o b, using k^2 >= k
        Lin { slope, offset, from } => Lin { slope: slope * (a + b) + offset * a, offset: offset * b, from },
    }
}

fn ord_delta(e: Affine) -> OrdBound {
    match (e.slope, e.offset) {
        (1, 0) => Lin { slope: 0, offset: 0, from: 0 },
        (1, _) => Vanishes(0),
        (0, b) => Vanishes(b as usize + 1),
        (_, 0) => Vanishes(1),
        _ => Vanishes(0),
    }
}

fn ord_var(e: Affine, ideal: &AdicIdeal) -> OrdBound {
    let in_ideal = match ideal.variable_set() {
        Some(VariableSet::All) => true,
        Some(VariableSet::Finite(_)) if e.slope == 0 => ideal.contains_variable(e.offset),
        _ => false,
    };
    Lin { slope: 0, offset: usize::from(in_ideal), from: 0 }
}

impl SExpr {
    fn eval(&self, field: Field, k: usize) -> Result<Polynomial> {
        Ok(match self {
            SExpr::Poly(p) => p.clone(),
            SExpr::Var(e) => {
                let v = e.at(k)?;
                if v == 0 {
                    return Err(Error::Oracle(format!("t[...] evaluates to t0 at k = {k}")));
                }
                Polynomial::monomial(field, Monomial::var(v))
            }
            SExpr::Delta(e) => Polynomial::from_i64(field, i64::from(e.at(k)? as usize == k)),
            SExpr::Add(a, b) => &a.eval(field, k)? + &b.eval(field, k)?,
            SExpr::Sub(a, b) => &a.eval(field, k)? - &b.eval(field, k)?,
            SExpr::Neg(a) => -&a.eval(field, k)?,
            SExpr::Mul(a, b) => &a.eval(field, k)? * &b.eval(field, k)?,
            SExpr::Pow(a, e) => a.eval(field, k)?.pow(e.at(k)?),
        })
    }

    fn ord_bound(&self, ideal: &AdicIdeal) -> OrdBound {
        match self {
            SExpr::Poly(p) => ord_constant(p, ideal),
            SExpr::Var(e) => ord_var(*e, ideal),
            SExpr::Delta(e) => ord_delta(*e),
            SExpr::Add(a, b) | SExpr::Sub(a, b) => ord_sum(a.ord_bound(ideal), b.ord_bound(ideal)),
            SExpr::Neg(a) => a.ord_bound(ideal),
            SExpr::Mul(a, b) => ord_product(a.ord_bound(ideal), b.ord_bound(ideal)),
            SExpr::Pow(a, e) => ord_power(a.ord_bound(ideal), *e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Builtin {
    BSeries,
    Geom,
}

/// A parsed ring stream `k -> expr(k)`.
#[derive(Clone, Debug)]
pub struct StreamSpec {
    text: String,
    field: Field,
    index: String,
    start: usize,
    body: SExpr,
    builtin: Option<Builtin>,
}

struct StreamParser<'a> {
    p: Parser<'a>,
    field: Field,
    index: String,
}

fn name(p: &mut Parser<'_>) -> Option<String> {
    p.skip_ws();
    let start = p.pos();
    let mut out = String::new();
    while let Some(c) = p.peek_raw().filter(u8::is_ascii_lowercase) {
        out.push(c as char);
        p.bump();
    }
    if out.is_empty() {
        p.set_pos(start);
        None
    } else {
        Some(out)
    }
}

impl<'a> StreamParser<'a> {
    fn index_name(&mut self) -> Result<()> {
        let at = self.p.pos();
        match name(&mut self.p) {
            Some(n) if n == self.index => Ok(()),
            _ => {
                self.p.set_pos(at);
                self.p.skip_ws();
                let what = format!("index '{}'", self.index);
                self.p.fail(&what)
            }
        }
    }

    fn iterm(&mut self) -> Result<Affine> {
        if self.p.at_digit() {
            let n = self.p.nat()?;
            if self.p.eat(b'*') {
                self.index_name()?;
                return Ok(Affine { slope: n, offset: 0 });
            }
            return Ok(Affine::constant(n));
        }
        self.index_name()?;
        Ok(Affine { slope: 1, offset: 0 })
    }

    fn iexpr(&mut self) -> Result<Affine> {
        let mut acc = self.iterm()?;
        while self.p.eat(b'+') {
            let t = self.iterm()?;
            acc = Affine { slope: acc.slope + t.slope, offset: acc.offset + t.offset };
        }
        Ok(acc)
    }

    fn expr(&mut self) -> Result<SExpr> {
        let mut acc = self.term()?;
        loop {
            if self.p.eat(b'+') {
                acc = SExpr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.p.eat(b'-') {
                acc = SExpr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SExpr> {
        let negate = self.p.eat(b'-');
        let mut acc = self.factor()?;
        while self.p.eat(b'*') {
            acc = SExpr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(if negate { SExpr::Neg(Box::new(acc)) } else { acc })
    }

    fn factor(&mut self) -> Result<SExpr> {
        let b = self.base()?;
        if !self.p.eat(b'^') {
            return Ok(b);
        }
        let e = if self.p.at_digit() {
            Affine::constant(self.p.nat()?)
        } else if self.p.eat(b'(') {
            let e = self.iexpr()?;
            self.p.expect(b')')?;
            e
        } else {
            self.p.note("natural number");
            self.p.note("'('");
            self.index_name()?;
            Affine { slope: 1, offset: 0 }
        };
        Ok(match b {
            SExpr::Poly(p) if e.slope == 0 => SExpr::Poly(p.pow(e.offset)),
            b => SExpr::Pow(Box::new(b), e),
        })
    }

    fn base(&mut self) -> Result<SExpr> {
        match self.p.peek() {
            Some(b'(') => {
                self.p.bump();
                let e = self.expr()?;
                self.p.expect(b')')?;
                Ok(e)
            }
            Some(b't') => {
                let at = self.p.pos();
                self.p.bump();
                if self.p.peek_raw() == Some(b'[') {
                    self.p.bump();
                    let e = self.iexpr()?;
                    self.p.expect(b']')?;
                    return Ok(SExpr::Var(e));
                }
                self.p.set_pos(at);
                let v = self.p.variable_index()?;
                Ok(SExpr::Poly(Polynomial::monomial(self.field, Monomial::var(v))))
            }
            Some(b'd') if self.p.eat_keyword("delta") => {
                self.p.expect(b'(')?;
                let e = self.iexpr()?;
                self.p.expect(b')')?;
                Ok(SExpr::Delta(e))
            }
            Some(b'0'..=b'9') => Ok(SExpr::Poly(coefficient(&mut self.p, self.field)?)),
            _ => {
                self.p.note("'('");
                self.p.note("variable");
                self.p.note("'delta'");
                self.p.fail("integer")
            }
        }
    }
}

impl StreamSpec {
    pub fn parse(text: &str, field: Field) -> Result<StreamSpec> {
        let trimmed = text.trim();
        let builtin = match trimmed {
            "@bseries" => Some((Builtin::BSeries, "k >= 1: t[k]^k")),
            "@geom" => Some((Builtin::Geom, "i: t1^i")),
            _ => None,
        };
        let source = builtin.map_or(text, |(_, s)| s);
        let mut p = Parser::new(source);
        if p.peek() == Some(b'@') {
            return p.fail("'@bseries' or '@geom'");
        }
        let at = p.pos();
        let mut index = name(&mut p);
        if index.as_deref() == Some("stream") {
            index = name(&mut p);
        }
        let index = match index {
            Some(n) if !n.starts_with('t') && n != "delta" => n,
            _ => {
                p.set_pos(at.max(p.pos()));
                p.skip_ws();
                return p.fail("index name");
            }
        };
        let start = if p.eat_keyword(">=") { p.nat()? as usize } else { 0 };
        p.expect(b':')?;
        let mut sp = StreamParser { p, field, index: index.clone() };
        let body = sp.expr()?;
        sp.p.finish()?;
        Ok(StreamSpec { text: trimmed.to_string(), field, index, start, body, builtin: builtin.map(|b| b.0) })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn index_name(&self) -> &str {
        &self.index
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// The ideal a built-in stream is defined over.
    pub fn default_ideal(&self) -> Option<AdicIdeal> {
        match self.builtin? {
            Builtin::BSeries => Some(AdicIdeal::all_variables()),
            Builtin::Geom => Some(AdicIdeal::vars([1])),
        }
    }

    pub fn eval(&self, k: usize) -> Result<Polynomial> {
        if k < self.start {
            return Ok(Polynomial::zero(self.field));
        }
        self.body.eval(self.field, k)
    }

    /// `N_i` derived from an affine lower bound on the term orders; `None`
    /// when the order does not grow with the index.
    pub fn support_bound(&self, ideal: &AdicIdeal, threshold: usize) -> Option<usize> {
        match self.body.ord_bound(ideal) {
            Vanishes(n) => Some(n),
            Lin { slope: 0, offset, from } => (offset > threshold).then_some(from),
            Lin { slope, offset, from } => {
                let need = (threshold + 1).saturating_sub(offset);
                Some(from.max(need.div_ceil(slope)))
            }
        }
    }

    /// The stream in the completion of `ring`, a rank-one free module.
    pub fn to_stream(&self, ring: Arc<ModulePresentation>) -> Result<DecayStream> {
        if ring.rank() != 1 || !ring.is_free() {
            return Err(Error::Precondition("streams from text live in the ring itself".into()));
        }
        if ring.field() != self.field {
            return Err(Error::DomainMismatch(ring.field().to_string(), self.field.to_string()));
        }
        let spec = self.clone();
        let ideal = ring.ideal().clone();
        let bound_spec = self.clone();
        let r = ring.clone();
        Ok(DecayStream::new(
            ring,
            Arc::new(move |k| TowerElement::from_element(vec![spec.eval(k)?], r.clone())),
            Arc::new(move |i| bound_spec.support_bound(&ideal, i)),
        ))
    }
}

impl fmt::Display for StreamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decay::series_sum;
    use crate::poly::parse_poly;

    fn q(s: &str) -> Polynomial {
        parse_poly(s, Field::Rational).unwrap()
    }

    fn ring(ideal: AdicIdeal) -> Arc<ModulePresentation> {
        Arc::new(ModulePresentation::ring(Field::Rational, ideal))
    }

    #[test]
    fn builtin_bseries_matches_constructor() {
        let spec = StreamSpec::parse("@bseries", Field::Rational).unwrap();
        let s = spec.to_stream(ring(spec.default_ideal().unwrap())).unwrap();
        assert!(s.agrees_with(&DecayStream::bseries(Field::Rational), 6).unwrap());
        assert_eq!(spec.eval(0).unwrap(), q("0"));
        assert_eq!(spec.eval(3).unwrap(), q("t3^3"));
    }

    #[test]
    fn affine_exponents_and_bounds() {
        let spec = StreamSpec::parse("stream n: t1^(2*n + 1)", Field::Rational).unwrap();
        assert_eq!(spec.eval(2).unwrap(), q("t1^5"));
        let ideal = AdicIdeal::vars([1]);
        // ord = 2n + 1 <= 4 exactly for n <= 1
        assert_eq!(spec.support_bound(&ideal, 4), Some(2));
        let s = spec.to_stream(ring(ideal)).unwrap();
        assert_eq!(s.check(6).unwrap().supports[4], vec![0, 1]);
    }

    #[test]
    fn delta_terms() {
        let spec = StreamSpec::parse("k: 3*delta(2) + t2*delta(k)", Field::Rational).unwrap();
        assert_eq!(spec.eval(2).unwrap(), q("3 + t2"));
        assert_eq!(spec.eval(5).unwrap(), q("t2"));
        let ideal = AdicIdeal::vars([1, 2]);
        assert_eq!(spec.support_bound(&ideal, 0), Some(3));
        assert_eq!(spec.support_bound(&ideal, 1), None);
    }

    #[test]
    fn constant_stream_has_no_bound() {
        let spec = StreamSpec::parse("k: 1", Field::Rational).unwrap();
        let s = spec.to_stream(ring(AdicIdeal::vars([1]))).unwrap();
        assert!(matches!(s.check(3), Err(Error::DecayFailure { threshold: 0, .. })));
    }

    #[test]
    fn start_offset_and_sum() {
        let spec = StreamSpec::parse("k>=2: t1^k", Field::Rational).unwrap();
        let s = spec.to_stream(ring(AdicIdeal::vars([1]))).unwrap();
        let total = series_sum(&s, 4).unwrap();
        assert_eq!(total.project(3).unwrap().coords[0], q("t1^2 + t1^3"));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(StreamSpec::parse("k: t[j]", Field::Rational), Err(Error::Parse { offset: 5, .. })));
        assert!(matches!(StreamSpec::parse("k t1", Field::Rational), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(StreamSpec::parse("@nope", Field::Rational), Err(Error::Parse { offset: 0, .. })));
        assert!(StreamSpec::parse("k: t1^", Field::Rational).is_err());
    }
}
