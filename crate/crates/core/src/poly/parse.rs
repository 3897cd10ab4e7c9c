use num_bigint::BigInt;

use super::{Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::field::Field;

/// Byte-level cursor shared by the polynomial and stream grammars.
///
/// Errors report the furthest offset reached together with every token that
/// would have been accepted there.
pub struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    err_pos: usize,
    expected: Vec<String>,
}

impl<'a> Parser<'a> {
    pub fn new(text: &'a str) -> Parser<'a> {
        Parser { src: text.as_bytes(), pos: 0, err_pos: 0, expected: Vec::new() }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn set_pos(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    /// Peeks without skipping whitespace.
    pub fn peek_raw(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    pub fn bump(&mut self) {
        self.pos += 1;
    }

    pub fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            self.note(&format!("'{}'", c as char));
            false
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            self.note(&format!("'{kw}'"));
            false
        }
    }

    /// Records that `what` was acceptable at the current position.
    pub fn note(&mut self, what: &str) {
        if self.pos > self.err_pos {
            self.err_pos = self.pos;
            self.expected.clear();
        }
        if self.pos == self.err_pos && !self.expected.iter().any(|e| e == what) {
            self.expected.push(what.to_string());
        }
    }

    pub fn fail<T>(&mut self, what: &str) -> Result<T> {
        self.note(what);
        Err(self.error())
    }

    pub fn error(&self) -> Error {
        let mut expected = self.expected.clone();
        expected.sort();
        Error::Parse { offset: self.err_pos, expected }
    }

    pub fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    pub fn at_digit(&mut self) -> bool {
        matches!(self.peek(), Some(b'0'..=b'9'))
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.src.get(self.pos), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
        }
    }

    pub fn nat(&mut self) -> Result<u32> {
        let start = self.pos;
        match self.digits() {
            Some(d) => d.parse().map_err(|_| {
                self.pos = start;
                self.note("natural number below 2^32");
                self.error()
            }),
            None => self.fail("natural number"),
        }
    }

    pub fn big_nat(&mut self) -> Result<BigInt> {
        match self.digits() {
            Some(d) => Ok(d.parse().expect("digits parse as BigInt")),
            None => self.fail("integer"),
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.fail("end of input")
        }
    }

    /// `'t' nat`, with a bare `t` read as `t1`.
    pub fn variable_index(&mut self) -> Result<u32> {
        self.expect(b't')?;
        if matches!(self.peek_raw(), Some(b'0'..=b'9')) {
            let at = self.pos;
            let n = self.nat()?;
            if n == 0 {
                self.pos = at;
                return self.fail("variable index >= 1");
            }
            Ok(n)
        } else {
            Ok(1)
        }
    }
}

/// Parses the polynomial grammar:
///
/// ```text
/// expr   := term (('+'|'-') term)*
/// term   := '-'? factor ('*' factor)*
/// factor := base ('^' nat)?
/// base   := coeff | var | '(' expr ')'
/// var    := 't' nat
/// coeff  := int ('/' nat)?
/// ```
pub fn parse_poly(text: &str, field: Field) -> Result<Polynomial> {
    let mut p = Parser::new(text);
    let out = expr(&mut p, field)?;
    p.finish()?;
    Ok(out)
}

fn expr(p: &mut Parser<'_>, field: Field) -> Result<Polynomial> {
    let mut acc = term(p, field)?;
    loop {
        if p.eat(b'+') {
            acc = &acc + &term(p, field)?;
        } else if p.eat(b'-') {
            acc = &acc - &term(p, field)?;
        } else {
            return Ok(acc);
        }
    }
}

fn term(p: &mut Parser<'_>, field: Field) -> Result<Polynomial> {
    let negate = p.eat(b'-');
    let mut acc = factor(p, field)?;
    while p.eat(b'*') {
        acc = &acc * &factor(p, field)?;
    }
    Ok(if negate { -&acc } else { acc })
}

fn factor(p: &mut Parser<'_>, field: Field) -> Result<Polynomial> {
    let b = base(p, field)?;
    if p.eat(b'^') {
        let n = p.nat()?;
        Ok(b.pow(n))
    } else {
        Ok(b)
    }
}

fn base(p: &mut Parser<'_>, field: Field) -> Result<Polynomial> {
    match p.peek() {
        Some(b'(') => {
            p.bump();
            let e = expr(p, field)?;
            p.expect(b')')?;
            Ok(e)
        }
        Some(b't') => {
            let v = p.variable_index()?;
            Ok(Polynomial::monomial(field, Monomial::var(v)))
        }
        Some(b'0'..=b'9') => coefficient(p, field),
        _ => {
            p.note("'('");
            p.note("variable");
            p.fail("integer")
        }
    }
}

/// `int ('/' nat)?` as a constant polynomial.
pub(crate) fn coefficient(p: &mut Parser<'_>, field: Field) -> Result<Polynomial> {
    let num = p.big_nat()?;
    let den = if p.eat(b'/') {
        let at = p.pos();
        let d = p.big_nat()?;
        if d == BigInt::from(0) {
            p.set_pos(at);
            return p.fail("nonzero denominator");
        }
        d
    } else {
        BigInt::from(1)
    };
    let c = field.from_ratio(&num, &den).map_err(|_| {
        p.note("denominator invertible in the field");
        p.error()
    })?;
    Ok(Polynomial::constant(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Polynomial {
        parse_poly(s, Field::Rational).unwrap()
    }

    #[test]
    fn grammar_examples() {
        let p = q("t1^2*t2 - 1/2");
        assert_eq!(p.len(), 2);
        assert_eq!(p.to_string(), "t1^2*t2 - 1/2");
        assert!(q("0").is_zero());
        assert_eq!(q("t1*t1"), q("t1^2"));
        assert_eq!(q("t"), q("t1"));
        assert_eq!(q("(1 + t2)^2"), q("1 + 2*t2 + t2^2"));
    }

    #[test]
    fn error_positions() {
        match parse_poly("t1^", Field::Rational) {
            Err(Error::Parse { offset, expected }) => {
                assert_eq!(offset, 3);
                assert!(expected.iter().any(|e| e.contains("natural")));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_poly("t0", Field::Rational), Err(Error::Parse { offset: 1, .. })));
        assert!(matches!(parse_poly("1 + + 2", Field::Rational), Err(Error::Parse { offset: 4, .. })));
        assert!(matches!(parse_poly("t1 )", Field::Rational), Err(Error::Parse { offset: 3, .. })));
    }

    #[test]
    fn prime_field_fractions() {
        let f = Field::Prime(7);
        assert_eq!(parse_poly("1/2", f).unwrap().to_string(), "4");
        assert!(parse_poly("1/7", f).is_err());
    }
}
