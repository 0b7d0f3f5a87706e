//! Dense row-major matrices over a [`Scalar`].
//!
//! Sizes here never exceed a few dozen rows (compound matrices of a 6×6
//! lattice), so plain Gaussian elimination is all that is needed.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, DEFAULT_REL_TOL};

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for r in 0..self.rows {
            list.entry(&&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        list.finish()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::ShapeMismatch("columns of unequal length".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| cols[j][i].clone()))
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| T::from_i64(v)).collect())
                .collect(),
        )
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

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + prod;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch("subtraction of unequal shapes".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    /// Rows `rows` and columns `cols`, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |r, c| self[(rows[r], cols[c])].clone())
    }

    pub fn frobenius_sq(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, a| acc + a.clone() * a.clone())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Operator norm (largest singular value) in floating point.
    pub fn operator_norm(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let m = nalgebra::DMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.data.iter().map(Scalar::to_f64),
        );
        m.singular_values().max()
    }

    /// Forward elimination: echelon form, pivot columns, and whether an odd
    /// number of row swaps occurred.
    fn eliminate(&self) -> (Self, Vec<usize>, bool) {
        let mut a = self.clone();
        let scale = self.max_abs();
        let mut pivots = Vec::new();
        let mut swapped_odd = false;
        let mut row = 0;
        for col in 0..a.cols {
            if row == a.rows {
                break;
            }
            let Some(p) = pivot_row(&a, row, col, scale) else {
                continue;
            };
            if p != row {
                for c in 0..a.cols {
                    a.data.swap(p * a.cols + c, row * a.cols + c);
                }
                swapped_odd = !swapped_odd;
            }
            let piv = a[(row, col)].clone();
            for r in row + 1..a.rows {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone() / piv.clone();
                a[(r, col)] = T::zero();
                for c in col + 1..a.cols {
                    let delta = factor.clone() * a[(row, c)].clone();
                    a[(r, c)] = a[(r, c)].clone() - delta;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (a, pivots, swapped_odd)
    }

    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let (echelon, pivots, odd) = self.eliminate();
        if pivots.len() < self.rows {
            return Ok(T::zero());
        }
        let prod = (0..self.rows).fold(T::one(), |acc, i| acc * echelon[(i, i)].clone());
        Ok(if odd { -prod } else { prod })
    }

    pub fn rank(&self) -> usize {
        self.eliminate().1.len()
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let Some(p) = pivot_row(&a, col, col, scale) else {
                return Err(Error::SingularGenerators {
                    det: "0".into(),
                });
            };
            if p != col {
                for c in 0..n {
                    a.data.swap(p * n + c, col * n + c);
                    inv.data.swap(p * n + c, col * n + c);
                }
            }
            let piv = a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = a[(col, c)].clone() / piv.clone();
                inv[(col, c)] = inv[(col, c)].clone() / piv.clone();
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for c in 0..n {
                    let da = factor.clone() * a[(col, c)].clone();
                    let di = factor.clone() * inv[(col, c)].clone();
                    a[(r, c)] = a[(r, c)].clone() - da;
                    inv[(r, c)] = inv[(r, c)].clone() - di;
                }
            }
        }
        Ok(inv)
    }

    /// Exact equality for rationals, entrywise tolerance for floats.
    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return false;
        }
        let scale = self.max_abs().max(other.max_abs());
        self.data
            .iter()
            .zip(&other.data)
            .all(|(a, b)| (a.clone() - b.clone()).is_negligible(scale, rel_tol))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && self.approx_eq(&Self::identity(self.rows), DEFAULT_REL_TOL)
    }
}

fn pivot_row<T: Scalar>(a: &Matrix<T>, from: usize, col: usize, scale: f64) -> Option<usize> {
    if T::EXACT {
        (from..a.rows).find(|&r| !a[(r, col)].is_zero())
    } else {
        let (best, val) = (from..a.rows)
            .map(|r| (r, a[(r, col)].to_f64().abs()))
            .fold((from, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        (val > DEFAULT_REL_TOL * scale.max(f64::MIN_POSITIVE) && val > 0.0).then_some(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_rational, Rational};
    use num::Zero;

    fn qm(rows: &[&[&str]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse_rational(s).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn det_small_cases() {
        let m = qm(&[&["1", "2"], &["3", "4"]]);
        assert_eq!(m.det().unwrap(), parse_rational("-2").unwrap());
        let p = qm(&[&["0", "1", "0"], &["1", "0", "0"], &["0", "0", "1"]]);
        assert_eq!(p.det().unwrap(), parse_rational("-1").unwrap());
        let s = qm(&[&["1", "2"], &["2", "4"]]);
        assert!(s.det().unwrap().is_zero());
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn inverse_round_trip() {
        let m = qm(&[&["2", "1/2", "0"], &["1", "3", "-1"], &["0", "1/3", "1"]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(qm(&[&["1", "1"], &["1", "1"]]).inverse().is_err());
    }

    #[test]
    fn float_det_uses_partial_pivoting() {
        let m = Matrix::<f64>::from_rows(vec![vec![1e-20, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!((m.det().unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let m = qm(&[&["3", "0"], &["0", "-5"]]);
        assert!((m.operator_norm() - 5.0).abs() < 1e-12);
    }
}
