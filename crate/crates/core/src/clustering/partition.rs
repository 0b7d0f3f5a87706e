use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::chain_exponent;
use super::union_find::UnionFind;
use crate::boxes::{sup_dist, sup_norm, IndexBox};
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
use crate::scalar::{Exponent, Rational, Scalar};

/// Largest admissible clustering exponent, `1 / (2 C₁(d) + 2)`.
pub fn delta_threshold(d: usize) -> f64 {
    1.0 / (2.0 * chain_exponent(d) as f64 + 2.0)
}

/// Which exponents `build_partition_with` accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaPolicy {
    /// `0 < δ < 1/(2C₁(d)+2)`, the range where separation is guaranteed.
    #[default]
    Guaranteed,
    /// Any `0 < δ < 1`; the relation is still well defined, only the guarantee is lost.
    Exploratory,
}

/// `x ≤ s^δ`, decided exactly for rationals.
pub(crate) fn within_power<T: Scalar>(x: &T, s: u64, delta: &Exponent) -> bool {
    x.cmp_power(s, delta) != Ordering::Greater
}

/// One step of the clustering relation: `max(|j - j'|, |μ_j - μ_j'|) ≤ (|j| + |j'|)^δ`.
pub fn is_cluster_link<T: Scalar>(j: &[i64], mu: &T, j2: &[i64], mu2: &T, delta: &Exponent) -> bool {
    let s = (sup_norm(j) + sup_norm(j2)) as u64;
    within_power(&Rational::from_i64(sup_dist(j, j2)), s, delta)
        && within_power(&(mu2.clone() - mu.clone()).abs(), s, delta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: usize,
    pub members: Vec<Vec<i64>>,
    /// Smallest `|j|` over the members.
    pub m_alpha: i64,
    /// Largest `|j|` over the members.
    #[serde(rename = "M_alpha")]
    pub big_m_alpha: i64,
    /// Some member lies within the boundary margin of the box.
    pub boundary: bool,
}

impl Cluster {
    pub fn is_dyadic(&self) -> bool {
        self.big_m_alpha <= 2 * self.m_alpha
    }

    pub fn diameter(&self) -> i64 {
        let mut best = 0;
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                best = best.max(sup_dist(a, b));
            }
        }
        best
    }
}

/// Connected components of the clustering relation on `[-N, N]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPartition {
    grid: IndexBox,
    delta: Exponent,
    margin: i64,
    assignment: Vec<usize>,
    clusters: Vec<Cluster>,
}

#[derive(Serialize, Deserialize)]
struct PartitionFile {
    box_radius: i64,
    dim: usize,
    delta: f64,
    clusters: Vec<Cluster>,
}

impl ClusterPartition {
    pub fn grid(&self) -> &IndexBox {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn box_radius(&self) -> i64 {
        self.grid.radii()[0]
    }

    pub fn delta(&self) -> Exponent {
        self.delta
    }

    /// Members with `|j| > N - margin` mark their cluster as boundary.
    pub fn margin(&self) -> i64 {
        self.margin
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster_of(&self, j: &[i64]) -> Option<usize> {
        self.grid.index_of(j).map(|i| self.assignment[i])
    }

    /// Cluster ids indexed by box position.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PartitionFile {
            box_radius: self.box_radius(),
            dim: self.dim(),
            delta: self.delta.value(),
            clusters: self.clusters.clone(),
        })
        .expect("partition serializes")
    }

    /// Rebuilds a partition from [`ClusterPartition::to_json`] output; every box point must be covered once.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: PartitionFile =
            serde_json::from_value(value.clone()).map_err(|e| Error::parse("partition", e.to_string()))?;
        let grid = IndexBox::cube(file.dim, file.box_radius);
        let mut assignment = vec![usize::MAX; grid.len()];
        for (pos, c) in file.clusters.iter().enumerate() {
            if c.id != pos {
                return Err(Error::parse("partition", "cluster ids must be 0..k in order"));
            }
            for j in &c.members {
                let i = grid
                    .index_of(j)
                    .ok_or_else(|| Error::parse("partition", format!("member {j:?} outside the box")))?;
                if assignment[i] != usize::MAX {
                    return Err(Error::parse("partition", format!("member {j:?} listed twice")));
                }
                assignment[i] = c.id;
            }
        }
        if assignment.contains(&usize::MAX) {
            return Err(Error::parse("partition", "clusters do not cover the box"));
        }
        let delta = Exponent::from_f64(file.delta)?;
        Ok(Self {
            margin: boundary_margin(file.box_radius, &delta),
            grid,
            delta,
            assignment,
            clusters: file.clusters,
        })
    }
}

/// `⌈(2N)^δ⌉ + 1`.
pub fn boundary_margin(radius: i64, delta: &Exponent) -> i64 {
    let s = (2 * radius) as u64;
    let fl = delta.floor_power(s) as i64;
    let exact = Rational::from_i64(fl).cmp_power(s, delta) == Ordering::Equal;
    (if exact { fl } else { fl + 1 }) + 1
}

pub fn build_partition<T: Scalar>(basis: &LatticeBasis<T>, radius: i64, delta: f64) -> Result<ClusterPartition> {
    build_partition_with(basis, radius, delta, DeltaPolicy::Guaranteed)
}

pub fn build_partition_with<T: Scalar>(
    basis: &LatticeBasis<T>,
    radius: i64,
    delta: f64,
    policy: DeltaPolicy,
) -> Result<ClusterPartition> {
    let d = basis.dim();
    let max = match policy {
        DeltaPolicy::Guaranteed => delta_threshold(d),
        DeltaPolicy::Exploratory => 1.0,
    };
    if !(delta > 0.0 && delta < max) {
        return Err(Error::DeltaOutOfRange { delta, max });
    }
    if radius < 1 {
        return Err(Error::InvalidParameter(format!("box radius {radius} must be >= 1")));
    }
    let exp = Exponent::from_f64(delta)?;
    let grid = IndexBox::cube(d, radius);
    let points: Vec<Vec<i64>> = grid.points().collect();
    let mus: Vec<T> = points.par_iter().map(|j| basis.form(j, j)).collect();
    // a link needs |j - j'| ≤ (|j| + |j'|)^δ ≤ (2N)^δ
    let reach = exp.floor_power((2 * radius) as u64) as i64;

    let edges: Vec<(usize, usize)> = (0..points.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let j = &points[i];
            grid.neighbours(j, reach)
                .into_iter()
                .filter(|&k| k > i && is_cluster_link(j, &mus[i], &points[k], &mus[k], &exp))
                .map(|k| (i, k))
                .collect::<Vec<_>>()
        })
        .collect();

    let mut uf = UnionFind::new(points.len());
    for &(a, b) in &edges {
        uf.union(a, b);
    }
    let assignment = uf.labels();
    let count = assignment.iter().max().map_or(0, |m| m + 1);
    let margin = boundary_margin(radius, &exp);
    let mut clusters: Vec<Cluster> = (0..count)
        .map(|id| Cluster {
            id,
            members: Vec::new(),
            m_alpha: i64::MAX,
            big_m_alpha: 0,
            boundary: false,
        })
        .collect();
    for (i, j) in points.into_iter().enumerate() {
        let c = &mut clusters[assignment[i]];
        let n = sup_norm(&j);
        c.m_alpha = c.m_alpha.min(n);
        c.big_m_alpha = c.big_m_alpha.max(n);
        c.boundary |= n > radius - margin;
        c.members.push(j);
    }
    Ok(ClusterPartition {
        grid,
        delta: exp,
        margin,
        assignment,
        clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RationalLattice;

    #[test]
    fn threshold_values() {
        assert!((delta_threshold(1) - 1.0 / 14.0).abs() < 1e-15);
        assert!((delta_threshold(2) - 1.0 / 42.0).abs() < 1e-15);
    }

    #[test]
    fn one_dimensional_clusters() {
        let b = RationalLattice::identity(1);
        let p = build_partition_with(&b, 10, 0.1, DeltaPolicy::Exploratory).unwrap();
        let c0 = p.cluster_of(&[0]).unwrap();
        assert_eq!(p.clusters()[c0].members, vec![vec![-1], vec![0], vec![1]]);
        for j in 2..=10 {
            let c = &p.clusters()[p.cluster_of(&[j]).unwrap()];
            assert_eq!(c.members.len(), 1, "j = {j}");
        }
        assert_eq!(p.clusters().len(), 21 - 2);
    }

    #[test]
    fn guaranteed_policy_rejects_large_delta() {
        let b = RationalLattice::identity(2);
        assert!(matches!(build_partition(&b, 4, 0.1), Err(Error::DeltaOutOfRange { .. })));
        assert!(matches!(build_partition(&b, 4, 0.0), Err(Error::DeltaOutOfRange { .. })));
        assert!(build_partition(&b, 4, 0.02).is_ok());
    }

    #[test]
    fn margin_and_json_round_trip() {
        let b = RationalLattice::identity(2);
        let p = build_partition_with(&b, 8, 0.1, DeltaPolicy::Exploratory).unwrap();
        // (16)^0.1 ≈ 1.32
        assert_eq!(p.margin(), 3);
        let back = ClusterPartition::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        let json = p.to_json();
        assert!(json["clusters"][0].get("M_alpha").is_some());
    }

    #[test]
    fn antipodal_points_not_directly_linked() {
        let e = Exponent::from_f64(0.1).unwrap();
        let mu = Rational::from_i64(25);
        assert!(!is_cluster_link(&[3, 4], &mu, &[-3, -4], &mu, &e));
    }
}
