//! Dense matrices over the Gaussian rationals with exact elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { Scalar::one() } else { Scalar::zero() })
    }

    /// The all-ones matrix.
    pub fn ones(n: usize) -> Self {
        Self::from_fn(n, n, |_, _| Scalar::one())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let n = rows.len();
        Ok(Matrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("shape mismatch in sum".into()));
        }
        Ok(Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.scale(&Scalar::int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, col)].inv().expect("pivot is nonzero");
            for c in col..m.cols {
                let v = &m[(row, c)] * &inv;
                m[(row, c)] = v;
            }
            for r in 0..m.rows {
                if r == row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in col..m.cols {
                    if m[(row, c)].is_zero() {
                        continue;
                    }
                    let v = &m[(row, c)] * &factor;
                    m[(r, c)] -= &v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -&r[(row, f)];
                }
                v
            })
            .collect()
    }

    /// Some solution of `A x = b`, with all free variables set to zero.
    pub fn solve(&self, b: &[Scalar]) -> Result<Vec<Scalar>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!("right-hand side of length {} for {} rows", b.len(), self.rows)));
        }
        let aug = Matrix::from_fn(self.rows, self.cols + 1, |r, c| if c < self.cols { self[(r, c)].clone() } else { b[r].clone() });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Err(Error::Inconsistent);
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Ok(x)
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Canonical basis of the span of `vectors`: the nonzero rows of their
/// reduced row echelon form.
pub fn reduced_span(vectors: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_rows(vectors.to_vec()).expect("equal-length vectors");
    let (r, pivots) = m.rref();
    (0..pivots.len()).map(|k| r.row(k).to_vec()).collect()
}

/// `⟨a, b⟩ = Σ a_k conj(b_k)`.
pub fn inner(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(x, y)| x * &y.conj()).sum()
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(Scalar::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(a.apply(&ns[0]).iter().all(Scalar::is_zero));
        assert_eq!(Matrix::identity(3).nullspace().len(), 0);
        assert_eq!(Matrix::zeros(2, 3).nullspace().len(), 3);
    }

    #[test]
    fn solving() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = a.solve(&[Scalar::int(3), Scalar::int(1)]).unwrap();
        assert_eq!(x, vec![Scalar::int(2), Scalar::int(1)]);
        let singular = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(singular.solve(&[Scalar::int(1), Scalar::int(3)]), Err(Error::Inconsistent));
        assert!(singular.solve(&[Scalar::int(1)]).is_err());
    }

    #[test]
    fn complex_elimination() {
        let i = Scalar::i();
        let a = Matrix::from_rows(vec![vec![i.clone(), Scalar::one()], vec![Scalar::one(), -&i]]).unwrap();
        // second row is -i times the first
        assert_eq!(a.rank(), 1);
        assert_eq!(a.mul(&a.adjoint()).unwrap()[(0, 0)], Scalar::int(2));
    }

    #[test]
    fn reduced_span_is_canonical() {
        let v = vec![vec![Scalar::int(2), Scalar::int(2)], vec![Scalar::int(1), Scalar::int(-1)]];
        assert_eq!(reduced_span(&v), vec![vec![Scalar::one(), Scalar::zero()], vec![Scalar::zero(), Scalar::one()]]);
    }
}
