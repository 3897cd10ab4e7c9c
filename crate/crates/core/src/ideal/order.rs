use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

/// Value of an adic order function.
///
/// `AtLeast(n)` records that every inspected level was consistent with
/// `ord >= n` but no exact value was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderValue {
    Finite(usize),
    AtLeast(usize),
    Infinity,
}

impl OrderValue {
    /// A lower bound guaranteed by this value.
    pub fn floor(self) -> Option<usize> {
        match self {
            OrderValue::Finite(n) | OrderValue::AtLeast(n) => Some(n),
            OrderValue::Infinity => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, OrderValue::Finite(_))
    }

    /// Compares as lower bounds: `Finite(n)` and `AtLeast(n)` both read as
    /// `n`, with `AtLeast` ranked above at equal `n`, and `Infinity` on top.
    pub fn cmp_floor(self, other: OrderValue) -> Ordering {
        fn key(v: OrderValue) -> (usize, u8) {
            match v {
                OrderValue::Finite(n) => (n, 0),
                OrderValue::AtLeast(n) => (n, 1),
                OrderValue::Infinity => (usize::MAX, 2),
            }
        }
        key(self).cmp(&key(other))
    }

    pub fn distance(self) -> DyadicDistance {
        match self {
            OrderValue::Finite(e) => DyadicDistance::Pow(e),
            OrderValue::AtLeast(e) => DyadicDistance::AtMost(e),
            OrderValue::Infinity => DyadicDistance::Zero,
        }
    }
}

impl fmt::Display for OrderValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderValue::Finite(n) => write!(f, "{n}"),
            OrderValue::AtLeast(n) => write!(f, ">={n}"),
            OrderValue::Infinity => write!(f, "inf"),
        }
    }
}

/// A value of the dyadic metric: `0`, `(1/2)^e`, or an upper bound `<= (1/2)^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DyadicDistance {
    Zero,
    Pow(usize),
    AtMost(usize),
}

impl DyadicDistance {
    /// Exponent `e` with distance `<= (1/2)^e`; `None` for zero.
    pub fn exponent(self) -> Option<usize> {
        match self {
            DyadicDistance::Zero => None,
            DyadicDistance::Pow(e) | DyadicDistance::AtMost(e) => Some(e),
        }
    }

    /// Numeric comparison of the (upper-bound) values.
    pub fn cmp_value(self, other: DyadicDistance) -> Ordering {
        match (self.exponent(), other.exponent()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => b.cmp(&a),
        }
    }
}

impl fmt::Display for DyadicDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pow = |e: usize| -> String {
            if e == 0 {
                "1".to_string()
            } else {
                format!("1/{}", BigUint::one() << e)
            }
        };
        match *self {
            DyadicDistance::Zero => write!(f, "0"),
            DyadicDistance::Pow(e) => write!(f, "{}", pow(e)),
            DyadicDistance::AtMost(e) => write!(f, "<={}", pow(e)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display() {
        assert_eq!(OrderValue::Finite(3).to_string(), "3");
        assert_eq!(OrderValue::AtLeast(9).to_string(), ">=9");
        assert_eq!(DyadicDistance::Pow(0).to_string(), "1");
        assert_eq!(DyadicDistance::Pow(1).to_string(), "1/2");
        assert_eq!(DyadicDistance::AtMost(9).to_string(), "<=1/512");
        assert_eq!(DyadicDistance::Zero.to_string(), "0");
    }
}
