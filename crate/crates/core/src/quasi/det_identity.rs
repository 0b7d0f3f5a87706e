use num::ToPrimitive;

use super::params::{dot, FrequencyParams, SpaceTimeSite};
use crate::compound::{compound_matrix_or_unit, index_tuples, integer_minors};
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};

/// The vectors `f_i = (ω·l_i, k_i)` of a chain and the matrix `A = −S + R` they define.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainBilinearData<T: Scalar> {
    pub omega_bar: Vec<T>,
    pub lambda: T,
    pub l_vectors: Vec<Vec<i64>>,
    pub k_vectors: Vec<Vec<i64>>,
    /// `(ω·l_i, k_i)`.
    pub f_vectors: Vec<(T, Vec<i64>)>,
    /// `S_i^{i'} = (ω·l_i)(ω·l_{i'})`.
    pub s_matrix: Matrix<T>,
    /// `R_i^{i'} = ⟨Wk_i, Wk_{i'}⟩`.
    pub r_matrix: Matrix<T>,
    pub a_matrix: Matrix<T>,
}

impl<T: Scalar> ChainBilinearData<T> {
    /// Builds the data from explicit `l_i ∈ Z^n`, `k_i ∈ Z^d`; the `f_i` must be independent.
    pub fn from_vectors(
        basis: &LatticeBasis<T>,
        omega_bar: &[T],
        lambda: T,
        l_vectors: Vec<Vec<i64>>,
        k_vectors: Vec<Vec<i64>>,
    ) -> Result<Self> {
        let (d, n, g) = (basis.dim(), omega_bar.len(), l_vectors.len());
        if g == 0 || g > d + 1 {
            return Err(Error::InvalidOrder { order: g, max: d + 1 });
        }
        if k_vectors.len() != g {
            return Err(Error::ShapeMismatch(format!("{g} time vectors but {} space vectors", k_vectors.len())));
        }
        for (l, k) in l_vectors.iter().zip(&k_vectors) {
            if l.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: l.len() });
            }
            if k.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: k.len() });
            }
        }
        let bar: Vec<T> = l_vectors.iter().map(|l| dot(omega_bar, l)).collect();
        let x: Vec<T> = bar.iter().map(|b| lambda.clone() * b.clone()).collect();
        let f = Matrix::from_fn(g, d + 1, |i, c| if c == 0 { x[i].clone() } else { T::from_i64(k_vectors[i][c - 1]) });
        if f.rank() < g {
            return Err(Error::DependentVectors);
        }
        let s_matrix = Matrix::from_fn(g, g, |i, k| x[i].clone() * x[k].clone());
        let r_matrix = Matrix::from_fn(g, g, |i, k| basis.form(&k_vectors[i], &k_vectors[k]));
        let a_matrix = r_matrix.sub(&s_matrix)?;
        Ok(Self {
            omega_bar: omega_bar.to_vec(),
            lambda,
            f_vectors: x.into_iter().zip(k_vectors.iter().cloned()).collect(),
            l_vectors,
            k_vectors,
            s_matrix,
            r_matrix,
            a_matrix,
        })
    }

    pub fn g(&self) -> usize {
        self.l_vectors.len()
    }

    /// `S / λ²`, i.e. `(ω̄·l_i)(ω̄·l_{i'})`.
    fn s_bar(&self) -> Matrix<T> {
        let bar: Vec<T> = self.l_vectors.iter().map(|l| dot(&self.omega_bar, l)).collect();
        Matrix::from_fn(self.g(), self.g(), |i, k| bar[i].clone() * bar[k].clone())
    }

    /// `det(R − ξ S̄)`, the determinant of `A` at `λ² = ξ`.
    pub fn det_at(&self, xi: &T) -> Result<T> {
        self.r_matrix.sub(&self.s_bar().scale(xi))?.det()
    }
}

/// `f_i = (x_{q_i} − x_{q₀}, j_{q_i} − j_{q₀})` for chosen chain positions.
pub fn chain_bilinear_data<T: Scalar>(
    basis: &LatticeBasis<T>,
    params: &FrequencyParams<T>,
    sites: &[SpaceTimeSite],
    q0: usize,
    selected: &[usize],
) -> Result<ChainBilinearData<T>> {
    let anchor = sites
        .get(q0)
        .ok_or_else(|| Error::InvalidParameter(format!("anchor {q0} outside the chain")))?;
    let mut ls = Vec::new();
    let mut ks = Vec::new();
    for &q in selected {
        let s = sites
            .get(q)
            .ok_or_else(|| Error::InvalidParameter(format!("index {q} outside the chain")))?;
        ls.push(s.ell.iter().zip(&anchor.ell).map(|(a, b)| a - b).collect());
        ks.push(s.j.iter().zip(&anchor.j).map(|(a, b)| a - b).collect());
    }
    ChainBilinearData::from_vectors(basis, params.omega_bar(), params.lambda().clone(), ls, ks)
}

/// Chain positions whose differences from `q₀` form a basis of the span of all differences,
/// picked greedily by increasing distance from `q₀`.
pub fn independent_selection<T: Scalar>(params: &FrequencyParams<T>, sites: &[SpaceTimeSite], q0: usize) -> Vec<usize> {
    let Some(anchor) = sites.get(q0) else {
        return Vec::new();
    };
    let mut order: Vec<usize> = (0..sites.len()).filter(|&q| q != q0).collect();
    order.sort_by_key(|&q| (q.abs_diff(q0), q));
    let row = |q: usize| -> Vec<T> {
        let s = &sites[q];
        let dl: Vec<i64> = s.ell.iter().zip(&anchor.ell).map(|(a, b)| a - b).collect();
        let mut r = vec![params.lambda().clone() * dot(params.omega_bar(), &dl)];
        r.extend(s.j.iter().zip(&anchor.j).map(|(a, b)| T::from_i64(a - b)));
        r
    };
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut picked = Vec::new();
    let full = anchor.j.len() + 1;
    for q in order {
        rows.push(row(q));
        let m = Matrix::from_rows(rows.clone()).expect("rows share a length");
        if m.rank() == rows.len() {
            picked.push(q);
            if picked.len() == full {
                break;
            }
        } else {
            rows.pop();
        }
    }
    picked
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetIdentity<T: Scalar> {
    /// `g`-minors of `(k_1 | … | k_g)`; empty when `g > d`.
    pub p: Vec<i64>,
    /// `m_a ∈ Z^n` for each increasing `(g−1)`-tuple `a`, in lexicographic order.
    pub m_coeffs: Vec<Vec<i64>>,
    /// `|𝔉_g(W) p|²`.
    pub eta: T,
    /// `|𝔉_{g−1}(W) (ω̄·m_a)_a|²`.
    pub zeta: T,
    /// `(λ², det A)` at the evaluation points.
    pub evaluations: Vec<(T, T)>,
    /// Largest `|det A(λ) − (η − λ²ζ)|` over the evaluation points.
    pub residual: f64,
    /// `det(R + S̄)`, the value at `λ² = −1`.
    pub imaginary_det: T,
    pub m_max: i64,
    /// `g! · max|l_i| · max|k_i|^{g−1}`.
    pub m_bound: i128,
}

fn to_i64(r: &Rational) -> Result<i64> {
    r.to_integer()
        .to_i64()
        .ok_or_else(|| Error::InvalidParameter("integer minor exceeds i64".into()))
}

fn norm_sq<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone())
}

/// Computes `p`, `m_a` and checks `det A(λ) = |𝔉_g(W)p|² − λ²|𝔉_{g−1}(W)(ω̄·m_a)|²`
/// at the data's `λ` and at `λ ∈ {1/2, 1, 3/2}`, plus positivity at `λ² = −1`.
pub fn det_a_identity<T: Scalar>(basis: &LatticeBasis<T>, data: &ChainBilinearData<T>) -> Result<DetIdentity<T>> {
    let (d, g, n) = (basis.dim(), data.g(), data.omega_bar.len());
    let w = basis.dual();
    let (p, eta) = if g <= d {
        let p = integer_minors(&data.k_vectors)?;
        let image = compound_matrix_or_unit(w, g)?.mul_vec(&p.iter().map(|&v| T::from_i64(v)).collect::<Vec<_>>())?;
        let eta = norm_sq(&image);
        (p, eta)
    } else {
        (Vec::new(), T::zero())
    };

    let mut m_coeffs = Vec::new();
    for a in index_tuples(d, g - 1) {
        let mut m = Vec::with_capacity(n);
        for comp in 0..n {
            let mat = Matrix::<Rational>::from_fn(g, g, |i, c| {
                Rational::from_i64(if c == 0 { data.l_vectors[i][comp] } else { data.k_vectors[i][a[c - 1]] })
            });
            m.push(to_i64(&mat.det()?)?);
        }
        m_coeffs.push(m);
    }
    let weights: Vec<T> = m_coeffs.iter().map(|m| dot(&data.omega_bar, m)).collect();
    let zeta = norm_sq(&compound_matrix_or_unit(w, g - 1)?.mul_vec(&weights)?);

    let half = T::one() / T::from_i64(2);
    let mut lambdas = vec![data.lambda.clone(), half.clone(), T::one(), T::from_i64(3) * half];
    lambdas.dedup();
    let mut evaluations = Vec::new();
    let mut residual = 0.0f64;
    let mut violated = false;
    for lam in lambdas {
        let xi = lam.clone() * lam;
        let direct = data.det_at(&xi)?;
        let expected = eta.clone() - xi.clone() * zeta.clone();
        let diff = direct.clone() - expected.clone();
        let scale = eta.to_f64().abs() + (xi.clone() * zeta.clone()).to_f64().abs();
        violated |= !diff.is_negligible(scale, basis.rel_tol());
        residual = residual.max(diff.abs().to_f64());
        evaluations.push((xi, direct));
    }
    if violated {
        return Err(Error::IdentityViolation {
            residual: format!("{residual:e}"),
        });
    }
    let imaginary_det = data.det_at(&-T::one())?;
    let expected = eta.clone() + zeta.clone();
    let scale = expected.to_f64().abs();
    if !(imaginary_det.clone() - expected).is_negligible(scale, basis.rel_tol())
        || imaginary_det.is_negligible(scale, basis.rel_tol())
        || imaginary_det < T::zero()
    {
        return Err(Error::IdentityViolation {
            residual: format!("value at lambda^2 = -1 is {:e}", imaginary_det.to_f64()),
        });
    }

    let max_l = data.l_vectors.iter().flatten().map(|v| v.unsigned_abs()).max().unwrap_or(0) as i128;
    let max_k = data.k_vectors.iter().flatten().map(|v| v.unsigned_abs()).max().unwrap_or(0) as i128;
    let factorial: i128 = (1..=g as i128).product();
    let m_bound = factorial * max_l * max_k.pow(g as u32 - 1);
    let m_max = m_coeffs.iter().flatten().map(|v| v.abs()).max().unwrap_or(0);
    Ok(DetIdentity {
        p,
        m_coeffs,
        eta,
        zeta,
        evaluations,
        residual,
        imaginary_det,
        m_max,
        m_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RationalLattice;
    use crate::scalar::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn single_vector_case() {
        let b = RationalLattice::identity(2);
        let data = ChainBilinearData::from_vectors(&b, &[q("1")], q("1"), vec![vec![1]], vec![vec![3, 4]]).unwrap();
        assert_eq!(data.a_matrix[(0, 0)], q("24"));
        let id = det_a_identity(&b, &data).unwrap();
        assert_eq!(id.eta, q("25"));
        assert_eq!(id.zeta, q("1"));
        assert_eq!(id.p, vec![3, 4]);
        assert_eq!(id.m_coeffs, vec![vec![1]]);
        assert_eq!(id.residual, 0.0);
        assert_eq!(id.imaginary_det, q("26"));
    }

    #[test]
    fn equal_times_give_pure_gram() {
        let b = RationalLattice::identity(2);
        let data = ChainBilinearData::from_vectors(
            &b,
            &[q("1/3"), q("1/2")],
            q("5/4"),
            vec![vec![0, 0], vec![0, 0]],
            vec![vec![1, 2], vec![-1, 1]],
        )
        .unwrap();
        assert!(data.s_matrix.entries().iter().all(|x| *x == q("0")));
        let id = det_a_identity(&b, &data).unwrap();
        assert!(id.m_coeffs.iter().flatten().all(|&v| v == 0));
        assert_eq!(id.eta, data.r_matrix.det().unwrap());
    }

    #[test]
    fn full_rank_in_one_more_dimension() {
        let b = RationalLattice::from_generators(&[vec![q("1"), q("0")], vec![q("1/2"), q("1")]]).unwrap();
        let data = ChainBilinearData::from_vectors(
            &b,
            &[q("2/7")],
            q("1"),
            vec![vec![1], vec![0], vec![3]],
            vec![vec![1, 0], vec![0, 1], vec![2, 2]],
        )
        .unwrap();
        let id = det_a_identity(&b, &data).unwrap();
        assert!(id.p.is_empty());
        assert!(id.m_max as i128 <= id.m_bound);
    }

    #[test]
    fn dependent_vectors_rejected() {
        let b = RationalLattice::identity(1);
        let r = ChainBilinearData::from_vectors(&b, &[q("1")], q("1"), vec![vec![1], vec![2]], vec![vec![1], vec![2]]);
        assert!(matches!(r, Err(Error::DependentVectors)));
    }
}
