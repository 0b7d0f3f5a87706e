//! Flat-torus lattices: generators, dual matrix, and the quadratic form of the Laplacian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar, DEFAULT_REL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArithmeticMode {
    Exact,
    Floating { rel_tol: f64 },
}

/// Lattice `V Z^d` with dual matrix `W = V^{-T}`.
///
/// Eigenvalues of `-Δ` on the torus are `μ_j = |Wj|²`; the Gram matrix `WᵀW`
/// is cached so that `μ` and the bilinear form are a single quadratic form.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBasis<T: Scalar> {
    v: Matrix<T>,
    w: Matrix<T>,
    gram: Matrix<T>,
    rel_tol: f64,
}

pub type RationalLattice = LatticeBasis<Rational>;

impl<T: Scalar> LatticeBasis<T> {
    /// `v` holds the generators as columns.
    pub fn new(v: Matrix<T>) -> Result<Self> {
        Self::with_tolerance(v, DEFAULT_REL_TOL)
    }

    /// `rel_tol` is ignored for exact scalars.
    pub fn with_tolerance(v: Matrix<T>, rel_tol: f64) -> Result<Self> {
        if !v.is_square() || v.rows() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "generator matrix must be square and nonempty, got {}x{}",
                v.rows(),
                v.cols()
            )));
        }
        if v.entries().iter().any(|x| !x.to_f64().is_finite()) {
            return Err(Error::InvalidParameter("non-finite generator entry".into()));
        }
        let det = v.det()?;
        // relative to the Hadamard bound, so scaling V does not change the verdict
        let hadamard: f64 = (0..v.cols())
            .map(|c| v.column(c).iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt())
            .product();
        if det.is_zero() || (!T::EXACT && det.is_negligible(hadamard, rel_tol)) {
            return Err(Error::SingularGenerators {
                det: format!("{:e}", det.to_f64()),
            });
        }
        let w = v.inverse()?.transpose();
        let gram = w.transpose().mul(&w)?;
        Ok(Self {
            v,
            w,
            gram,
            rel_tol,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(Matrix::identity(d)).expect("identity is invertible")
    }

    /// Rectangular torus with side lengths `sides`; `W = diag(1/side)`.
    pub fn rectangular(sides: &[T]) -> Result<Self> {
        let d = sides.len();
        Self::new(Matrix::from_fn(d, d, |r, c| {
            if r == c {
                sides[r].clone()
            } else {
                T::zero()
            }
        }))
    }

    /// Builds from generator columns.
    pub fn from_generators(columns: &[Vec<T>]) -> Result<Self> {
        Self::new(Matrix::from_columns(columns)?)
    }

    pub fn dim(&self) -> usize {
        self.v.rows()
    }

    pub fn generators(&self) -> &Matrix<T> {
        &self.v
    }

    pub fn dual(&self) -> &Matrix<T> {
        &self.w
    }

    /// `WᵀW`, the matrix of the quadratic form `j ↦ μ_j`.
    pub fn gram(&self) -> &Matrix<T> {
        &self.gram
    }

    pub fn mode(&self) -> ArithmeticMode {
        if T::EXACT {
            ArithmeticMode::Exact
        } else {
            ArithmeticMode::Floating {
                rel_tol: self.rel_tol,
            }
        }
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    fn check_dim(&self, y: &[i64]) -> Result<()> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: y.len(),
            });
        }
        Ok(())
    }

    /// `μ_j = |Wj|²`.
    pub fn mu(&self, j: &[i64]) -> Result<T> {
        self.bilinear(j, j)
    }

    /// `⟨Wy, Wy'⟩`.
    pub fn bilinear(&self, y: &[i64], y2: &[i64]) -> Result<T> {
        self.check_dim(y)?;
        self.check_dim(y2)?;
        Ok(self.form(y, y2))
    }

    /// Unchecked bilinear form; callers guarantee matching dimensions.
    pub(crate) fn form(&self, y: &[i64], y2: &[i64]) -> T {
        let d = self.dim();
        let mut acc = T::zero();
        for a in 0..d {
            if y[a] == 0 {
                continue;
            }
            let mut row = T::zero();
            for b in 0..d {
                if y2[b] != 0 {
                    row = row + self.gram[(a, b)].clone() * T::from_i64(y2[b]);
                }
            }
            acc = acc + T::from_i64(y[a]) * row;
        }
        acc
    }

    /// `Wy` as a vector.
    pub fn dual_image(&self, y: &[i64]) -> Result<Vec<T>> {
        self.check_dim(y)?;
        self.w.mul_vec(&y.iter().map(|&v| T::from_i64(v)).collect::<Vec<_>>())
    }

    /// `(c, C)` with `c|j|² ≤ μ_j ≤ C|j|²` (euclidean `|j|`): `c = 1/|W⁻¹|²`, `C = |W|²`.
    pub fn norm_equivalence_constants(&self) -> (f64, f64) {
        let w_norm = self.w.operator_norm();
        let w_inv_norm = self.v.transpose().operator_norm();
        (1.0 / (w_inv_norm * w_inv_norm), w_norm * w_norm)
    }

    /// Same lattice with `f64` arithmetic.
    pub fn to_f64(&self) -> LatticeBasis<f64> {
        LatticeBasis {
            v: self.v.map(Scalar::to_f64),
            w: self.w.map(Scalar::to_f64),
            gram: self.gram.map(Scalar::to_f64),
            rel_tol: self.rel_tol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;
    use num::Zero;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn rectangular_dual_is_reciprocal() {
        let basis = RationalLattice::rectangular(&[q("1"), q("2")]).unwrap();
        assert_eq!(basis.dual()[(1, 1)], q("1/2"));
        assert!(basis.dual()[(0, 1)].is_zero());
        assert_eq!(basis.mu(&[2, 2]).unwrap(), q("5"));
    }

    #[test]
    fn dual_times_generators_transpose_is_identity() {
        let basis = RationalLattice::from_generators(&[vec![q("1"), q("0")], vec![q("1/2"), q("1")]]).unwrap();
        let prod = basis.dual().mul(&basis.generators().transpose()).unwrap();
        assert!(prod.is_identity());
    }

    #[test]
    fn repeated_column_is_singular() {
        let err = RationalLattice::from_generators(&[vec![q("1"), q("2")], vec![q("1"), q("2")]]).unwrap_err();
        assert!(matches!(err, Error::SingularGenerators { .. }));
        let nearly = LatticeBasis::<f64>::from_generators(&[vec![1.0, 2.0], vec![1.0, 2.0 + 1e-14]]).unwrap_err();
        assert!(matches!(nearly, Error::SingularGenerators { .. }));
    }

    #[test]
    fn mu_and_bilinear_basics() {
        let basis = RationalLattice::identity(2);
        assert_eq!(basis.mu(&[3, 4]).unwrap(), q("25"));
        assert!(basis.mu(&[0, 0]).unwrap().is_zero());
        assert!(basis.bilinear(&[1, 0], &[0, 1]).unwrap().is_zero());
        assert!(matches!(
            basis.mu(&[1, 2, 3]),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn norm_equivalence_for_rectangular() {
        let basis = RationalLattice::rectangular(&[q("1"), q("2")]).unwrap();
        let (c, big) = basis.norm_equivalence_constants();
        assert!((c - 0.25).abs() < 1e-12);
        assert!((big - 1.0).abs() < 1e-12);
    }
}
