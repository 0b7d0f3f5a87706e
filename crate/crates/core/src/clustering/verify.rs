use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::chain_exponent;
use super::partition::{is_cluster_link, ClusterPartition};
use crate::boxes::{sup_dist, sup_norm};
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
use crate::scalar::{Rational, Scalar};

/// Values to check against instead of fitting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstantOverrides {
    /// Clusters with `M_α` at or below this need not be dyadic.
    pub dyadic_threshold: Option<i64>,
    /// Constant for the intra-cluster diameter bound at the reference exponent.
    pub diameter_constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairViolation {
    pub j1: Vec<i64>,
    pub j2: Vec<i64>,
    /// `|j1 - j2| + |μ₁ - μ₂|`.
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicViolation {
    pub cluster: usize,
    pub m_alpha: i64,
    #[serde(rename = "M_alpha")]
    pub big_m_alpha: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub interior_clusters: usize,
    pub boundary_clusters: usize,
    /// Cross-cluster pairs tested explicitly; farther pairs are separated by `|j1 - j2|` alone.
    pub pairs_checked: u64,
    pub separation_violations: Vec<PairViolation>,
    /// Cross-cluster pairs that satisfy the one-step relation (a partition bug if nonempty).
    pub link_violations: Vec<PairViolation>,
    /// Largest `M_α` among interior clusters that are not dyadic (0 when all are).
    pub fitted_dyadic_threshold: i64,
    pub dyadic_threshold_used: i64,
    pub dyadicity_violations: Vec<DyadicViolation>,
    /// `(C₁(d) + 1) δ`.
    pub reference_exponent: f64,
    /// Smallest `C` with `|j1 - j2| + |μ₁ - μ₂| ≤ C (|j1| + |j2|)^{reference_exponent}` inside clusters.
    pub fitted_diameter_constant: f64,
    /// Smallest `e` with the same bound at `C = 1`; `None` if some pair has `|j1| + |j2| = 1` and a larger left side.
    pub fitted_diameter_exponent: Option<f64>,
    pub diameter_violations: Vec<PairViolation>,
    /// `(M_α, diameter)` over interior clusters.
    pub diameter_series: Vec<(i64, i64)>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.separation_violations.is_empty()
            && self.link_violations.is_empty()
            && self.dyadicity_violations.is_empty()
            && self.diameter_violations.is_empty()
    }
}

fn pair_lhs<T: Scalar>(j1: &[i64], mu1: &T, j2: &[i64], mu2: &T) -> T {
    T::from_i64(sup_dist(j1, j2)) + (mu1.clone() - mu2.clone()).abs()
}

/// Checks separation between interior clusters, dyadicity, and the intra-cluster diameter bound.
pub fn verify_cluster_properties<T: Scalar>(
    basis: &LatticeBasis<T>,
    partition: &ClusterPartition,
    overrides: &ConstantOverrides,
) -> Result<VerificationReport> {
    if basis.dim() != partition.dim() {
        return Err(Error::DimensionMismatch {
            expected: partition.dim(),
            found: basis.dim(),
        });
    }
    let grid = partition.grid();
    let delta = partition.delta();
    let clusters = partition.clusters();
    let assignment = partition.assignment();
    let points: Vec<Vec<i64>> = grid.points().collect();
    let mus: Vec<T> = points.par_iter().map(|j| basis.form(j, j)).collect();
    let interior = |i: usize| !clusters[assignment[i]].boundary;
    let reach = delta.floor_power((2 * partition.box_radius()) as u64) as i64;

    let per_site: Vec<(u64, Vec<PairViolation>, Vec<PairViolation>)> = (0..points.len())
        .into_par_iter()
        .filter(|&i| interior(i))
        .map(|i| {
            let mut checked = 0;
            let mut sep = Vec::new();
            let mut link = Vec::new();
            for k in grid.neighbours(&points[i], reach) {
                if k <= i || !interior(k) || assignment[k] == assignment[i] {
                    continue;
                }
                checked += 1;
                let s = (sup_norm(&points[i]) + sup_norm(&points[k])) as u64;
                let lhs = pair_lhs(&points[i], &mus[i], &points[k], &mus[k]);
                let record = || PairViolation {
                    j1: points[i].clone(),
                    j2: points[k].clone(),
                    lhs: lhs.to_f64(),
                    rhs: (s as f64).powf(delta.value()),
                };
                if lhs.cmp_power(s, &delta) != Ordering::Greater {
                    sep.push(record());
                }
                if is_cluster_link(&points[i], &mus[i], &points[k], &mus[k], &delta) {
                    link.push(record());
                }
            }
            (checked, sep, link)
        })
        .collect();
    let mut pairs_checked = 0;
    let mut separation_violations = Vec::new();
    let mut link_violations = Vec::new();
    for (c, s, l) in per_site {
        pairs_checked += c;
        separation_violations.extend(s);
        link_violations.extend(l);
    }

    let interior_clusters: Vec<_> = clusters.iter().filter(|c| !c.boundary).collect();
    let fitted_dyadic_threshold = interior_clusters
        .iter()
        .filter(|c| !c.is_dyadic())
        .map(|c| c.big_m_alpha)
        .max()
        .unwrap_or(0);
    let dyadic_threshold_used = overrides.dyadic_threshold.unwrap_or(fitted_dyadic_threshold);
    let dyadicity_violations = interior_clusters
        .iter()
        .filter(|c| !c.is_dyadic() && c.big_m_alpha > dyadic_threshold_used)
        .map(|c| DyadicViolation {
            cluster: c.id,
            m_alpha: c.m_alpha,
            big_m_alpha: c.big_m_alpha,
        })
        .collect();

    let reference_exponent = (chain_exponent(basis.dim()) as f64 + 1.0) * delta.value();
    let mut fitted_diameter_constant: f64 = 0.0;
    let mut fitted_diameter_exponent = Some(0.0f64);
    let mut diameter_violations = Vec::new();
    let mut diameter_series = Vec::new();
    for c in &interior_clusters {
        diameter_series.push((c.big_m_alpha, c.diameter()));
        let mu_of: Vec<T> = c.members.iter().map(|j| basis.form(j, j)).collect();
        for a in 0..c.members.len() {
            for b in a + 1..c.members.len() {
                let (j1, j2) = (&c.members[a], &c.members[b]);
                let lhs = pair_lhs(j1, &mu_of[a], j2, &mu_of[b]).to_f64();
                let s = (sup_norm(j1) + sup_norm(j2)) as f64;
                let rhs = s.powf(reference_exponent);
                fitted_diameter_constant = fitted_diameter_constant.max(lhs / rhs);
                fitted_diameter_exponent = match fitted_diameter_exponent {
                    Some(e) if s > 1.0 => Some(e.max(lhs.ln() / s.ln())),
                    Some(e) if lhs <= 1.0 => Some(e),
                    _ => None,
                };
                if let Some(cst) = overrides.diameter_constant {
                    if lhs > cst * rhs * (1.0 + 1e-12) {
                        diameter_violations.push(PairViolation {
                            j1: j1.clone(),
                            j2: j2.clone(),
                            lhs,
                            rhs: cst * rhs,
                        });
                    }
                }
            }
        }
    }

    Ok(VerificationReport {
        interior_clusters: interior_clusters.len(),
        boundary_clusters: clusters.len() - interior_clusters.len(),
        pairs_checked,
        separation_violations,
        link_violations,
        fitted_dyadic_threshold,
        dyadic_threshold_used,
        dyadicity_violations,
        reference_exponent,
        fitted_diameter_constant,
        fitted_diameter_exponent,
        diameter_violations,
        diameter_series,
    })
}

/// Exact rational version of `x > s^δ`, exposed for tests that replay the check independently.
pub fn exceeds_power(x: &Rational, s: u64, delta: &crate::scalar::Exponent) -> bool {
    x.cmp_power(s, delta) == Ordering::Greater
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::partition::{build_partition_with, DeltaPolicy};
    use crate::lattice::RationalLattice;

    #[test]
    fn identity_line_is_clean() {
        let b = RationalLattice::identity(1);
        let p = build_partition_with(&b, 64, 0.1, DeltaPolicy::Exploratory).unwrap();
        let r = verify_cluster_properties(&b, &p, &ConstantOverrides::default()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.fitted_dyadic_threshold, 1);
        assert!(r.pairs_checked > 0);
    }

    #[test]
    fn singletons_are_dyadic() {
        let b = RationalLattice::identity(1);
        let p = build_partition_with(&b, 20, 0.1, DeltaPolicy::Exploratory).unwrap();
        for c in p.clusters().iter().filter(|c| c.members.len() == 1) {
            assert!(c.is_dyadic());
        }
    }

    #[test]
    fn tight_override_reports_violations() {
        let b = RationalLattice::identity(1);
        let p = build_partition_with(&b, 16, 0.1, DeltaPolicy::Exploratory).unwrap();
        let strict = ConstantOverrides {
            dyadic_threshold: Some(0),
            diameter_constant: Some(1e-6),
        };
        let r = verify_cluster_properties(&b, &p, &strict).unwrap();
        assert_eq!(r.dyadicity_violations.len(), 1);
        assert!(!r.diameter_violations.is_empty());
        assert!(!r.passed());
    }
}
