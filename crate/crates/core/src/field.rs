//! Exact coefficient fields: the rationals and prime fields `F_p`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The base field of a polynomial ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    /// `F_p`; the modulus is prime and below `2^32`.
    Prime(u64),
}

impl Field {
    /// Builds `F_p`, rejecting composite or out-of-range moduli.
    pub fn prime(p: u64) -> Result<Field> {
        if !(2..(1 << 32)).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime below 2^32")));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(self) -> Coeff {
        match self {
            Field::Rational => Coeff::Q(BigRational::zero()),
            Field::Prime(p) => Coeff::Fp { r: 0, p },
        }
    }

    pub fn one(self) -> Coeff {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Coeff {
        match self {
            Field::Rational => Coeff::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Coeff::Fp { r: n.rem_euclid(p as i64) as u64, p },
        }
    }

    pub fn from_bigint(self, n: &BigInt) -> Coeff {
        match self {
            Field::Rational => Coeff::Q(BigRational::from_integer(n.clone())),
            Field::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                Coeff::Fp { r: r.to_u64().expect("residue fits"), p }
            }
        }
    }

    /// `num / den`, failing when the denominator vanishes in this field.
    pub fn from_ratio(self, num: &BigInt, den: &BigInt) -> Result<Coeff> {
        let d = self.from_bigint(den);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.from_bigint(num).div(&d))
    }

    pub fn contains(self, c: &Coeff) -> bool {
        c.field() == self
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp {p}"),
        }
    }
}

/// `Q` or `Fp <p>`, as printed.
impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::Rational);
        }
        let p = s.strip_prefix("Fp").ok_or_else(|| Error::InvalidField(format!("unknown field '{s}'")))?;
        let p: u64 = p.trim().parse().map_err(|_| Error::InvalidField(format!("bad modulus '{}'", p.trim())))?;
        Field::prime(p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A field element in canonical form.
///
/// Rationals are kept in lowest terms with positive denominator (guaranteed
/// by `BigRational`); prime-field residues satisfy `0 <= r < p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coeff {
    Q(BigRational),
    Fp { r: u64, p: u64 },
}

impl Coeff {
    pub fn field(&self) -> Field {
        match self {
            Coeff::Q(_) => Field::Rational,
            Coeff::Fp { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Q(q) => q.is_zero(),
            Coeff::Fp { r, .. } => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Q(q) => q.is_one(),
            Coeff::Fp { r, .. } => *r == 1,
        }
    }

    /// True when printing should use a leading minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            Coeff::Q(q) => q.is_negative(),
            Coeff::Fp { .. } => false,
        }
    }

    pub fn inv(&self) -> Option<Coeff> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Coeff::Q(q) => Coeff::Q(q.recip()),
            Coeff::Fp { r, p } => Coeff::Fp { r: pow_mod(*r, p - 2, *p), p: *p },
        })
    }

    /// Panics on division by zero or mixed fields.
    pub fn div(&self, other: &Coeff) -> Coeff {
        self * &other.inv().expect("division by zero coefficient")
    }

    pub fn abs(&self) -> Coeff {
        match self {
            Coeff::Q(q) => Coeff::Q(q.abs()),
            c => c.clone(),
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn mismatch(a: &Coeff, b: &Coeff) -> ! {
    panic!("coefficient field mismatch: {} vs {}", a.field(), b.field())
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Q(a), Coeff::Q(b)) => Coeff::Q(a + b),
            (Coeff::Fp { r: a, p }, Coeff::Fp { r: b, p: q }) if p == q => Coeff::Fp { r: (a + b) % p, p: *p },
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        self + &(-rhs)
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Q(a), Coeff::Q(b)) => Coeff::Q(a * b),
            (Coeff::Fp { r: a, p }, Coeff::Fp { r: b, p: q }) if p == q => Coeff::Fp { r: a * b % p, p: *p },
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match self {
            Coeff::Q(a) => Coeff::Q(-a),
            Coeff::Fp { r, p } => Coeff::Fp { r: (p - r) % p, p: *p },
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Q(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Coeff::Fp { r, .. } => write!(f, "{r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_inverse() {
        let f = Field::prime(7).unwrap();
        for n in 1..7 {
            let c = f.from_i64(n);
            assert!((&c * &c.inv().unwrap()).is_one());
        }
        assert!(f.zero().inv().is_none());
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(Field::prime(9).is_err());
        assert!(Field::prime(1).is_err());
    }

    #[test]
    fn rational_canonical_form() {
        let q = Field::Rational.from_ratio(&BigInt::from(2), &BigInt::from(-4)).unwrap();
        assert_eq!(q.to_string(), "-1/2");
        assert!(Field::Rational.from_ratio(&BigInt::from(1), &BigInt::from(0)).is_err());
    }

    #[test]
    fn negative_residues_reduce() {
        let f = Field::Prime(5);
        assert_eq!(f.from_i64(-1), Coeff::Fp { r: 4, p: 5 });
        assert_eq!(f.from_bigint(&BigInt::from(-7)), Coeff::Fp { r: 3, p: 5 });
    }
}
