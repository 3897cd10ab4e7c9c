//! Enumerations of `N^n` by the naturals.

/// Graded bijection `N^n <-> N`: tuples are listed by total sum, and
/// lexicographically (first entry fastest-growing last) within a sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TupleIndex {
    arity: usize,
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1u128, |acc, j| acc * (n - j) / (j + 1))
}

/// Number of `m`-tuples of naturals with sum `s`.
fn count(m: usize, s: usize) -> u128 {
    if m == 0 {
        return u128::from(s == 0);
    }
    binomial((s + m - 1) as u128, (m - 1) as u128)
}

/// Number of `m`-tuples with sum `< s`.
fn count_below(m: usize, s: usize) -> u128 {
    if s == 0 {
        return 0;
    }
    binomial((s - 1 + m) as u128, m as u128)
}

impl TupleIndex {
    pub fn new(arity: usize) -> TupleIndex {
        assert!(arity >= 1, "tuple arity must be positive");
        TupleIndex { arity }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        assert_eq!(tuple.len(), self.arity, "tuple length");
        let total: usize = tuple.iter().sum();
        let mut rank = count_below(self.arity, total);
        let mut rest = total;
        for (j, &x) in tuple.iter().enumerate() {
            let m = self.arity - j - 1;
            if m == 0 {
                break;
            }
            for a in 0..x {
                rank += count(m, rest - a);
            }
            rest -= x;
        }
        usize::try_from(rank).expect("index fits in usize")
    }

    pub fn decode(&self, index: usize) -> Vec<usize> {
        let mut r = index as u128;
        let mut total = 0;
        while count_below(self.arity, total + 1) <= r {
            total += 1;
        }
        r -= count_below(self.arity, total);
        let mut out = Vec::with_capacity(self.arity);
        let mut rest = total;
        for j in 0..self.arity {
            let m = self.arity - j - 1;
            if m == 0 {
                out.push(rest);
                break;
            }
            let mut a = 0;
            while r >= count(m, rest - a) {
                r -= count(m, rest - a);
                a += 1;
            }
            out.push(a);
            rest -= a;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_pairs() {
        let ix = TupleIndex::new(2);
        let listed: Vec<Vec<usize>> = (0..6).map(|n| ix.decode(n)).collect();
        assert_eq!(listed, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn roundtrip_small() {
        for arity in 1..4 {
            let ix = TupleIndex::new(arity);
            for n in 0..300 {
                assert_eq!(ix.encode(&ix.decode(n)), n);
            }
        }
    }
}
