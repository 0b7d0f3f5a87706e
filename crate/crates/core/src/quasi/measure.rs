use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxes::{sup_norm, IndexBox};
use crate::compound::{compound_matrix_or_unit, index_tuples, lattice_separation_constant};
use crate::error::{Error, Result};
use crate::intervals::{Interval, IntervalUnion};
use crate::lattice::LatticeBasis;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// `Λ = [1/2, 3/2]`.
pub const LAMBDA_RANGE: Interval = Interval { lo: 0.5, hi: 1.5 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRanges {
    /// `|p|_∞ ≤ p_max`.
    pub p_max: i64,
    /// `|m|_∞ ≤ m_max` over all entries of all `m_a`.
    pub m_max: i64,
    /// Orders `g` to include; `None` means `1..=d+1`.
    pub orders: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderMeasure {
    pub g: usize,
    pub excluded_measure: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub gamma: f64,
    pub tau: f64,
    /// `min_g 1/|𝔉_g(W⁻¹)|²_op`.
    pub separation_constant: f64,
    /// Excluded part of `Λ`, in `λ`.
    pub excluded: IntervalUnion,
    pub excluded_measure: f64,
    pub per_order: Vec<OrderMeasure>,
    /// `(p, m)` pairs whose interval was computed.
    pub pairs_examined: u64,
    /// `(p, m)` pairs in range skipped because `η_p > γ + (9/4)ζ_m`.
    pub pairs_pruned: u64,
}

/// `λ`-interval on which `|η − λ²ζ| < ε`, clipped to `Λ`.
fn excluded_lambdas(eta: f64, zeta: f64, eps: f64) -> Option<Interval> {
    if zeta == 0.0 {
        return (eta.abs() < eps).then_some(LAMBDA_RANGE);
    }
    let (a, b) = ((eta - eps) / zeta, (eta + eps) / zeta);
    let xi = Interval::new(a.min(b), a.max(b)).intersect(&Interval::new(0.25, 2.25))?;
    Some(Interval::new(xi.lo.sqrt(), xi.hi.sqrt()))
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Exact measure of `{λ ∈ Λ : |P_{p,m}(λ²)| < γ/(1 + |m|^τ) for some (p, m) ≠ 0 in range}`,
/// where `P_{p,m}(ξ) = |𝔉_g(W)p|² − ξ|𝔉_{g−1}(W)(ω̄·m_a)_a|²`.
///
/// Each `P` is affine in `ξ = λ²`, so every excluded set is one interval with closed-form
/// endpoints; the union is merged exactly. Arithmetic is `f64`.
pub fn measure_tilde_lambda<T: Scalar>(
    basis: &LatticeBasis<T>,
    omega_bar: &[f64],
    gamma: f64,
    tau: f64,
    ranges: &MeasureRanges,
) -> Result<MeasureReport> {
    let d = basis.dim();
    let n = omega_bar.len();
    let separation_constant = lattice_separation_constant(basis)?;
    let max = separation_constant / 4.0;
    if !(gamma >= 0.0 && gamma <= max) {
        return Err(Error::GammaOutOfRange { gamma, max });
    }
    if n == 0 || ranges.p_max < 0 || ranges.m_max < 0 || !tau.is_finite() {
        return Err(Error::InvalidParameter("empty frequency vector or negative ranges".into()));
    }
    let orders = ranges.orders.clone().unwrap_or_else(|| (1..=d + 1).collect());
    if let Some(&g) = orders.iter().find(|&&g| g == 0 || g > d + 1) {
        return Err(Error::InvalidOrder { order: g, max: d + 1 });
    }
    let w = basis.dual().map(Scalar::to_f64);
    let vt = basis.generators().transpose().map(Scalar::to_f64);

    let mut all = Vec::new();
    let mut per_order = Vec::new();
    let mut pairs_examined = 0;
    let mut pairs_pruned = 0;
    for &g in &orders {
        let p_dim = if g <= d { index_tuples(d, g).len() } else { 0 };
        let a_count = index_tuples(d, g - 1).len();
        let (cw_p, c_g) = if p_dim > 0 {
            let op = compound_matrix_or_unit(&vt, g)?.operator_norm();
            (Some(compound_matrix_or_unit(&w, g)?), 1.0 / (op * op))
        } else {
            (None, f64::INFINITY)
        };
        let cw_m: Matrix<f64> = compound_matrix_or_unit(&w, g - 1)?;
        let m_box = IndexBox::cube(a_count * n, ranges.m_max);
        let p_total = (2 * ranges.p_max + 1).pow(p_dim as u32) as u64;

        let found: Vec<(Vec<Interval>, u64, u64)> = (0..m_box.len())
            .into_par_iter()
            .map(|mi| {
                let m = m_box.point(mi);
                let weights: Vec<f64> = m
                    .chunks(n)
                    .map(|ma| ma.iter().zip(omega_bar).map(|(&c, w)| c as f64 * w).sum())
                    .collect();
                let zeta = norm_sq(&cw_m.mul_vec(&weights).expect("shapes agree"));
                let eps = gamma / (1.0 + (sup_norm(&m) as f64).powf(tau));
                let m_zero = m.iter().all(|&v| v == 0);
                let mut out = Vec::new();
                let Some(cw) = &cw_p else {
                    if !m_zero {
                        out.extend(excluded_lambdas(0.0, zeta, eps));
                    }
                    return (out, 1, 0);
                };
                // c_g |p|² ≤ η_p, and nothing is excluded once η_p > γ + (9/4)ζ
                let reach = (((gamma + 2.25 * zeta) / c_g).sqrt().floor() as i64).min(ranges.p_max);
                let p_box = IndexBox::cube(p_dim, reach);
                let mut examined = 0;
                for p in p_box.points() {
                    if m_zero && p.iter().all(|&v| v == 0) {
                        continue;
                    }
                    examined += 1;
                    let pf: Vec<f64> = p.iter().map(|&v| v as f64).collect();
                    let eta = norm_sq(&cw.mul_vec(&pf).expect("shapes agree"));
                    out.extend(excluded_lambdas(eta, zeta, eps));
                }
                let skipped = p_total - p_box.len() as u64;
                (out, examined, skipped)
            })
            .collect();
        let mut intervals = Vec::new();
        for (iv, e, s) in found {
            intervals.extend(iv);
            pairs_examined += e;
            pairs_pruned += s;
        }
        let union = IntervalUnion::from_intervals(intervals.clone()).clip(&LAMBDA_RANGE);
        per_order.push(OrderMeasure {
            g,
            excluded_measure: union.measure(),
            intervals: intervals.len(),
        });
        all.extend(intervals);
    }
    let excluded = IntervalUnion::from_intervals(all).clip(&LAMBDA_RANGE);
    Ok(MeasureReport {
        gamma,
        tau,
        separation_constant,
        excluded_measure: excluded.measure(),
        excluded,
        per_order,
        pairs_examined,
        pairs_pruned,
    })
}
