//! Dense exact linear algebra over a coefficient field.

use crate::field::{Coeff, Field};

pub type Vector = Vec<Coeff>;

pub fn zero_vector(field: Field, n: usize) -> Vector {
    vec![field.zero(); n]
}

pub fn is_zero(v: &[Coeff]) -> bool {
    v.iter().all(Coeff::is_zero)
}

/// In-place reduced row echelon form; returns the pivot column of each
/// nonzero row (zero rows are dropped).
pub fn rref(rows: &mut Vec<Vector>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Rank of a set of vectors of length `ncols`.
pub fn rank(vectors: &[Vector], ncols: usize) -> usize {
    let mut rows = vectors.to_vec();
    rref(&mut rows, ncols).len()
}

/// Solves `sum_k x_k * columns[k] = b`, returning the particular solution
/// with every free unknown set to zero.
pub fn solve(field: Field, columns: &[Vector], b: &[Coeff]) -> Option<Vector> {
    let m = b.len();
    let n = columns.len();
    let mut rows: Vec<Vector> = (0..m)
        .map(|i| {
            let mut row: Vector = columns.iter().map(|col| col[i].clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut rows, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = zero_vector(field, n);
    for (row, &c) in rows.iter().zip(&pivots) {
        x[c] = row[n].clone();
    }
    Some(x)
}

/// Basis of `{ x : sum_k x_k * columns[k] = 0 }`.
pub fn nullspace(field: Field, columns: &[Vector], m: usize) -> Vec<Vector> {
    let n = columns.len();
    let mut rows: Vec<Vector> = (0..m).map(|i| columns.iter().map(|col| col[i].clone()).collect()).collect();
    let pivots = rref(&mut rows, n);
    let mut basis = Vec::new();
    for f in (0..n).filter(|c| !pivots.contains(c)) {
        let mut x = zero_vector(field, n);
        x[f] = field.one();
        for (row, &c) in rows.iter().zip(&pivots) {
            x[c] = -&row[f];
        }
        basis.push(x);
    }
    basis
}

/// Inverse of a square matrix given by rows.
pub fn inverse(field: Field, mat: &[Vector]) -> Option<Vec<Vector>> {
    let n = mat.len();
    let mut rows: Vec<Vector> = mat
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            row
        })
        .collect();
    let pivots = rref(&mut rows, n);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    Some(rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// An incrementally built subspace supporting membership tests.
#[derive(Clone, Debug)]
pub struct Span {
    field: Field,
    dim: usize,
    rows: Vec<(usize, Vector)>,
}

impl Span {
    pub fn new(field: Field, dim: usize) -> Span {
        Span { field, dim, rows: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Reduces `v` against the stored rows; the result vanishes at every pivot.
    pub fn reduce(&self, v: &[Coeff]) -> Vector {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Coeff]) -> bool {
        is_zero(&self.reduce(v))
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: &[Coeff]) -> bool {
        let r = self.reduce(v);
        match r.iter().position(|c| !c.is_zero()) {
            None => false,
            Some(p) => {
                let inv = r[p].inv().unwrap();
                let row: Vector = r.iter().map(|c| c * &inv).collect();
                self.rows.push((p, row));
                true
            }
        }
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|(p, _)| *p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(f: Field, xs: &[i64]) -> Vector {
        xs.iter().map(|&x| f.from_i64(x)).collect()
    }

    #[test]
    fn solve_and_nullspace() {
        let f = Field::Rational;
        let cols = vec![v(f, &[1, 0, 1]), v(f, &[0, 1, 1]), v(f, &[1, 1, 2])];
        let x = solve(f, &cols, &v(f, &[2, 3, 5])).unwrap();
        let back: Vector = (0..3).map(|i| (0..3).fold(f.zero(), |acc, k| &acc + &(&x[k] * &cols[k][i]))).collect();
        assert_eq!(back, v(f, &[2, 3, 5]));
        assert!(solve(f, &cols, &v(f, &[1, 0, 0])).is_none());
        assert_eq!(nullspace(f, &cols, 3), vec![v(f, &[-1, -1, 1])]);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn inverse_roundtrip() {
        let f = Field::Prime(5);
        let m = vec![v(f, &[1, 2]), v(f, &[3, 4])];
        let inv = inverse(f, &m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let s = (0..2).fold(f.zero(), |a, k| &a + &(&m[i][k] * &inv[k][j]));
                assert_eq!(s, if i == j { f.one() } else { f.zero() });
            }
        }
        assert!(inverse(f, &[v(f, &[1, 2]), v(f, &[2, 4])]).is_none());
    }

    #[test]
    fn span_membership() {
        let f = Field::Rational;
        let mut s = Span::new(f, 3);
        assert!(s.insert(&v(f, &[1, 1, 0])));
        assert!(s.insert(&v(f, &[0, 1, 1])));
        assert!(!s.insert(&v(f, &[1, 2, 1])));
        assert!(s.contains(&v(f, &[1, 0, -1])));
        assert!(!s.contains(&v(f, &[0, 0, 1])));
        assert_eq!(s.rank(), 2);
    }
}
