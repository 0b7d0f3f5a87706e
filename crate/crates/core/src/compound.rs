//! Compound matrices, Cauchy–Binet, and the Gram-determinant identity for integer vectors.

use itertools::Itertools;
use num::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};

/// Strictly increasing `g`-tuples from `0..n` in lexicographic order.
pub fn index_tuples(n: usize, g: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(g).collect()
}

/// `g`-th compound matrix: all `g×g` minors, rows and columns indexed by [`index_tuples`].
pub fn compound_matrix<T: Scalar>(m: &Matrix<T>, g: usize) -> Result<Matrix<T>> {
    let max = m.rows().min(m.cols());
    if g == 0 || g > max {
        return Err(Error::InvalidOrder { order: g, max });
    }
    let rows = index_tuples(m.rows(), g);
    let cols = index_tuples(m.cols(), g);
    let mut out = Matrix::zeros(rows.len(), cols.len());
    for (r, rt) in rows.iter().enumerate() {
        for (c, ct) in cols.iter().enumerate() {
            out[(r, c)] = m.submatrix(rt, ct).det()?;
        }
    }
    Ok(out)
}

/// Compound matrix that also accepts `g = 0`, where it is the `1×1` matrix `[1]`.
pub fn compound_matrix_or_unit<T: Scalar>(m: &Matrix<T>, g: usize) -> Result<Matrix<T>> {
    if g == 0 {
        Ok(Matrix::identity(1))
    } else {
        compound_matrix(m, g)
    }
}

/// `det(MN)` for `M: g×d`, `N: d×g`, as the sum over `g`-subsets `S` of `det(M^S)·det(N_S)`.
pub fn cauchy_binet_det<T: Scalar>(m: &Matrix<T>, n: &Matrix<T>) -> Result<T> {
    if m.cols() != n.rows() || m.rows() != n.cols() {
        return Err(Error::ShapeMismatch(format!(
            "Cauchy-Binet needs g×d and d×g, got {}x{} and {}x{}",
            m.rows(),
            m.cols(),
            n.rows(),
            n.cols()
        )));
    }
    let g = m.rows();
    let all: Vec<usize> = (0..g).collect();
    let mut acc = T::zero();
    for s in (0..m.cols()).combinations(g) {
        let a = m.submatrix(&all, &s).det()?;
        if a.is_zero() {
            continue;
        }
        acc = acc + a * n.submatrix(&s, &all).det()?;
    }
    Ok(acc)
}

/// Maximal minors of an integer `d×g` matrix given by its columns: `p_b = det(F_b)`
/// for every increasing row tuple `b`.
pub fn integer_minors(columns: &[Vec<i64>]) -> Result<Vec<i64>> {
    let f = Matrix::<Rational>::from_columns(
        &columns
            .iter()
            .map(|c| c.iter().map(|&v| Rational::from_i64(v)).collect())
            .collect::<Vec<_>>(),
    )?;
    let g = f.cols();
    let all: Vec<usize> = (0..g).collect();
    index_tuples(f.rows(), g)
        .iter()
        .map(|rows| {
            let det = f.submatrix(rows, &all).det()?;
            det.to_integer()
                .to_i64()
                .ok_or_else(|| Error::InvalidParameter("integer minor exceeds i64".into()))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GramDetIdentity<T: Scalar> {
    /// Determinant of the Gram matrix `⟨Wf_i, Wf_k⟩`.
    #[serde(skip)]
    pub det_a: T,
    /// `g`-minors of `F = (f_1|…|f_g)`.
    pub p: Vec<i64>,
    /// `|𝔉_g(W) p|²`.
    #[serde(skip)]
    pub compound_norm_sq: T,
    /// `|p|² / |𝔉_g(W⁻¹)|_F²`, a certified lower bound for `det_a`.
    #[serde(skip)]
    pub frobenius_bound: T,
    /// `|p|² / |𝔉_g(W⁻¹)|²_op`, the sharp lower bound, in floating point.
    pub operator_bound: f64,
    /// `1 / |𝔉_g(W⁻¹)|²_op`.
    pub lattice_constant: f64,
}

/// Gram determinant of integer vectors `f_i` under the lattice form, together with
/// the minor vector `p` for which `det A = |𝔉_g(W) p|²`.
///
/// Verifies the identity (exactly for rationals) and the lower bound before returning.
pub fn gram_det_identity<T: Scalar>(basis: &LatticeBasis<T>, fs: &[Vec<i64>]) -> Result<GramDetIdentity<T>> {
    let d = basis.dim();
    let g = fs.len();
    if g == 0 || g > d {
        return Err(Error::InvalidOrder { order: g, max: d });
    }
    for f in fs {
        if f.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: f.len(),
            });
        }
    }
    let gram = Matrix::from_fn(g, g, |a, b| basis.form(&fs[a], &fs[b]));
    let det_a = gram.det()?;
    let scale = gram.max_abs().powi(g as i32);
    if det_a.is_negligible(scale, basis.rel_tol()) {
        return Err(Error::DependentVectors);
    }
    let p = integer_minors(fs)?;
    let p_t: Vec<T> = p.iter().map(|&v| T::from_i64(v)).collect();
    let cw = compound_matrix(basis.dual(), g)?;
    let image = cw.mul_vec(&p_t)?;
    let compound_norm_sq = image.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone());

    let residual = det_a.clone() - compound_norm_sq.clone();
    if !residual.is_negligible(det_a.to_f64().abs(), basis.rel_tol()) {
        return Err(Error::IdentityViolation {
            residual: format!("{:e}", residual.to_f64()),
        });
    }

    // W⁻¹ = Vᵀ
    let cinv = compound_matrix(&basis.generators().transpose(), g)?;
    let p_sq = p_t.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone());
    let frobenius_bound = p_sq.clone() / cinv.frobenius_sq();
    let op = cinv.operator_norm();
    let lattice_constant = 1.0 / (op * op);
    let operator_bound = p_sq.to_f64() * lattice_constant;

    if det_a < frobenius_bound {
        return Err(Error::IdentityViolation {
            residual: format!(
                "det A = {:e} below |p|^2/|C(W^-1)|_F^2 = {:e}",
                det_a.to_f64(),
                frobenius_bound.to_f64()
            ),
        });
    }
    if det_a.to_f64() < operator_bound * (1.0 - 1e-9) {
        return Err(Error::IdentityViolation {
            residual: format!(
                "det A = {:e} below |p|^2/|C(W^-1)|_op^2 = {operator_bound:e}",
                det_a.to_f64()
            ),
        });
    }
    Ok(GramDetIdentity {
        det_a,
        p,
        compound_norm_sq,
        frobenius_bound,
        operator_bound,
        lattice_constant,
    })
}

/// `min_g 1/|𝔉_g(W⁻¹)|²_op` over `g = 1..=d`.
pub fn lattice_separation_constant<T: Scalar>(basis: &LatticeBasis<T>) -> Result<f64> {
    let vt = basis.generators().transpose();
    let mut best = f64::INFINITY;
    for g in 1..=basis.dim() {
        let op = compound_matrix(&vt, g)?.operator_norm();
        best = best.min(1.0 / (op * op));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RationalLattice;
    use crate::scalar::parse_rational;
    use num::Zero;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn tuples_are_lexicographic() {
        assert_eq!(
            index_tuples(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
    }

    #[test]
    fn order_bounds() {
        let m = Matrix::<Rational>::identity(3);
        assert!(matches!(compound_matrix(&m, 0), Err(Error::InvalidOrder { .. })));
        assert!(matches!(compound_matrix(&m, 4), Err(Error::InvalidOrder { order: 4, max: 3 })));
        assert_eq!(compound_matrix(&m, 1).unwrap(), m);
        let full = compound_matrix(&m, 3).unwrap();
        assert_eq!((full.rows(), full.cols()), (1, 1));
    }

    #[test]
    fn cauchy_binet_matches_product_rule_when_square() {
        let m = Matrix::<Rational>::from_i64_rows(&[vec![2, 1], vec![0, 3]]).unwrap();
        let n = Matrix::<Rational>::from_i64_rows(&[vec![1, 4], vec![-1, 2]]).unwrap();
        let expected = m.det().unwrap() * n.det().unwrap();
        assert_eq!(cauchy_binet_det(&m, &n).unwrap(), expected);
        let bad = Matrix::<Rational>::identity(3);
        assert!(matches!(cauchy_binet_det(&m, &bad), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn standard_basis_gram_identity() {
        let basis = RationalLattice::identity(3);
        let out = gram_det_identity(&basis, &[vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(out.det_a, q("1"));
        assert_eq!(out.p.iter().filter(|&&v| v != 0).count(), 1);
        assert_eq!(out.p, vec![0, 1, 0]);
    }

    #[test]
    fn repeated_vector_is_dependent() {
        let basis = RationalLattice::identity(2);
        assert!(matches!(
            gram_det_identity(&basis, &[vec![1, 2], vec![1, 2]]),
            Err(Error::DependentVectors)
        ));
    }

    #[test]
    fn skew_lattice_identity() {
        let basis = RationalLattice::from_generators(&[vec![q("1"), q("0")], vec![q("1/2"), q("1")]]).unwrap();
        let out = gram_det_identity(&basis, &[vec![1, 2], vec![3, -1]]).unwrap();
        assert_eq!(out.p, vec![-7]);
        assert_eq!(out.det_a, out.compound_norm_sq);
        assert!(!out.det_a.is_zero());
    }
}
