//! Block constructions on a cluster partition: the diagonal/off-diagonal split,
//! the homological equation `[X, -Δ] = W + R`, the cluster-constant operator
//! `𝒟 = Σ M_α² Π_α`, and decay diagnostics for finite matrices.
//!
//! Matrices are single time-snapshots truncated to the partition's box, one
//! complex entry per pair of modes `(j, j')`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::complex::Complex;
use num::Zero;
use serde::{Deserialize, Serialize};

use crate::boxes::{sup_dist, sup_norm, IndexBox};
use crate::clustering::ClusterPartition;
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
use crate::scalar::{Exponent, Rational, Scalar};

type Key = (Vec<i64>, Vec<i64>);

/// Sparse matrix indexed by pairs of box points.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix<T: Scalar> {
    grid: IndexBox,
    entries: BTreeMap<Key, Complex<T>>,
}

#[derive(Serialize, Deserialize)]
struct Triplet {
    j: Vec<i64>,
    j_prime: Vec<i64>,
    re: serde_json::Value,
    im: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    box_radius: i64,
    dim: usize,
    entries: Vec<Triplet>,
}

impl<T: Scalar> BlockMatrix<T> {
    pub fn new(dim: usize, radius: i64) -> Self {
        Self {
            grid: IndexBox::cube(dim, radius),
            entries: BTreeMap::new(),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn box_radius(&self) -> i64 {
        self.grid.radii()[0]
    }

    pub fn grid(&self) -> &IndexBox {
        &self.grid
    }

    /// Sets entry `(j, j')`; zero values remove it.
    pub fn set(&mut self, j: &[i64], j2: &[i64], value: Complex<T>) -> Result<()> {
        for y in [j, j2] {
            if !self.grid.contains(y) {
                return Err(Error::InvalidParameter(format!(
                    "index {y:?} outside box of radius {}",
                    self.box_radius()
                )));
            }
        }
        let key = (j.to_vec(), j2.to_vec());
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    pub fn get(&self, j: &[i64], j2: &[i64]) -> Complex<T> {
        self.entries
            .get(&(j.to_vec(), j2.to_vec()))
            .cloned()
            .unwrap_or_else(Complex::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Vec<i64>, &Complex<T>)> {
        self.entries.iter().map(|((a, b), v)| (a, b, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn identity(dim: usize, radius: i64) -> Self {
        let mut m = Self::new(dim, radius);
        for j in m.grid.clone().points() {
            m.entries.insert((j.clone(), j), Complex::new(T::one(), T::zero()));
        }
        m
    }

    fn same_box(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::BoxMismatch {
                matrix: self.box_radius(),
                matrix_dim: self.dim(),
                partition: other.box_radius(),
                partition_dim: other.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_box(other)?;
        let mut out = self.clone();
        for (k, v) in &other.entries {
            let sum = out.entries.get(k).cloned().unwrap_or_else(Complex::zero) + v.clone();
            if sum.is_zero() {
                out.entries.remove(k);
            } else {
                out.entries.insert(k.clone(), sum);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            entries: self.entries.iter().map(|(k, v)| (k.clone(), -v.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_box(other)?;
        let mut rows: BTreeMap<&Vec<i64>, Vec<(&Vec<i64>, &Complex<T>)>> = BTreeMap::new();
        for ((a, b), v) in &other.entries {
            rows.entry(a).or_default().push((b, v));
        }
        let mut acc: BTreeMap<Key, Complex<T>> = BTreeMap::new();
        for ((i, k), a) in &self.entries {
            if let Some(row) = rows.get(k) {
                for &(j, b) in row {
                    let slot = acc.entry((i.clone(), j.clone())).or_insert_with(Complex::zero);
                    *slot = slot.clone() + a.clone() * b.clone();
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(Self {
            grid: self.grid.clone(),
            entries: acc,
        })
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            entries: self
                .entries
                .iter()
                .map(|((a, b), v)| ((b.clone(), a.clone()), v.conj()))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(abs_f64).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = MatrixFile {
            box_radius: self.box_radius(),
            dim: self.dim(),
            entries: self
                .entries
                .iter()
                .map(|((a, b), v)| Triplet {
                    j: a.clone(),
                    j_prime: b.clone(),
                    re: v.re.to_json(),
                    im: v.im.to_json(),
                })
                .collect(),
        };
        serde_json::to_value(file).expect("matrix serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: MatrixFile =
            serde_json::from_value(value.clone()).map_err(|e| Error::parse("matrix", e.to_string()))?;
        let mut m = Self::new(file.dim, file.box_radius);
        for t in file.entries {
            m.set(&t.j, &t.j_prime, Complex::new(T::from_json(&t.re)?, T::from_json(&t.im)?))?;
        }
        Ok(m)
    }
}

fn abs_f64<T: Scalar>(v: &Complex<T>) -> f64 {
    v.re.to_f64().hypot(v.im.to_f64())
}

fn check_box<T: Scalar>(q: &BlockMatrix<T>, partition: &ClusterPartition) -> Result<()> {
    if q.grid() != partition.grid() {
        return Err(Error::BoxMismatch {
            matrix: q.box_radius(),
            matrix_dim: q.dim(),
            partition: partition.box_radius(),
            partition_dim: partition.dim(),
        });
    }
    Ok(())
}

/// `(Q_D, Q_ND)`: entries inside one cluster, and entries across clusters.
pub fn dn_split<T: Scalar>(q: &BlockMatrix<T>, partition: &ClusterPartition) -> Result<(BlockMatrix<T>, BlockMatrix<T>)> {
    check_box(q, partition)?;
    let mut d = q.zeros_like();
    let mut nd = q.zeros_like();
    for ((a, b), v) in &q.entries {
        let target = if partition.cluster_of(a) == partition.cluster_of(b) {
            &mut d
        } else {
            &mut nd
        };
        target.entries.insert((a.clone(), b.clone()), v.clone());
    }
    Ok((d, nd))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomologicalSolution<T: Scalar> {
    pub x: BlockMatrix<T>,
    pub r: BlockMatrix<T>,
    pub delta: Exponent,
}

/// `|μ_j - μ_j'| ≥ ¼ (|j| + |j'|)^δ`.
fn well_separated<T: Scalar>(dmu: &T, s: u64, delta: &Exponent) -> bool {
    (dmu.clone().abs() * T::from_i64(4)).cmp_power(s, delta) != Ordering::Less
}

/// Solves `(μ_j' - μ_j) X_j^j' = W_j^j' + R_j^j'` entrywise: `X = W/(μ_j' - μ_j)`
/// where the eigenvalue gap is at least `¼(|j| + |j'|)^δ`, and `R = -W` elsewhere.
pub fn solve_homological<T: Scalar>(
    basis: &LatticeBasis<T>,
    w_nd: &BlockMatrix<T>,
    partition: &ClusterPartition,
    delta: f64,
) -> Result<HomologicalSolution<T>> {
    check_box(w_nd, partition)?;
    let exp = Exponent::from_f64(delta)?;
    let mut x = w_nd.zeros_like();
    let mut r = w_nd.zeros_like();
    for ((a, b), v) in &w_nd.entries {
        if partition.cluster_of(a) == partition.cluster_of(b) {
            return Err(Error::IntraClusterEntry {
                j: a.clone(),
                j_prime: b.clone(),
            });
        }
        let gap = basis.form(b, b) - basis.form(a, a);
        let s = (sup_norm(a) + sup_norm(b)) as u64;
        if well_separated(&gap, s, &exp) {
            x.entries.insert((a.clone(), b.clone()), v.clone() / gap);
        } else {
            r.entries.insert((a.clone(), b.clone()), -v.clone());
        }
    }
    Ok(HomologicalSolution { x, r, delta: exp })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomologicalCheck {
    pub entries: usize,
    /// Largest `|(μ_j' - μ_j) X - W - R|` over the support of `W`, `X`, `R`.
    pub max_residual: f64,
    /// Every residual is exactly zero (rationals) or negligible (floats).
    pub exact: bool,
    pub supports_disjoint: bool,
    pub supports_cover: bool,
}

pub fn check_homological<T: Scalar>(
    basis: &LatticeBasis<T>,
    w_nd: &BlockMatrix<T>,
    solution: &HomologicalSolution<T>,
) -> HomologicalCheck {
    let mut keys: Vec<&Key> = w_nd.entries.keys().collect();
    keys.extend(solution.x.entries.keys());
    keys.extend(solution.r.entries.keys());
    keys.sort();
    keys.dedup();
    let mut max_residual: f64 = 0.0;
    let mut exact = true;
    let scale = w_nd.max_abs();
    for (a, b) in &keys {
        let gap = basis.form(b, b) - basis.form(a, a);
        let res = solution.x.get(a, b) * gap - w_nd.get(a, b) - solution.r.get(a, b);
        max_residual = max_residual.max(abs_f64(&res));
        exact &= res.re.is_negligible(scale, basis.rel_tol()) && res.im.is_negligible(scale, basis.rel_tol());
    }
    let disjoint = solution.x.entries.keys().all(|k| !solution.r.entries.contains_key(k));
    let cover = w_nd
        .entries
        .keys()
        .all(|k| solution.x.entries.contains_key(k) || solution.r.entries.contains_key(k))
        && solution.x.nnz() + solution.r.nnz() == w_nd.nnz();
    HomologicalCheck {
        entries: keys.len(),
        max_residual,
        exact,
        supports_disjoint: disjoint,
        supports_cover: cover,
    }
}

/// Diagonal matrix with `M_α²` on every mode of cluster `α`.
pub fn build_d_operator<T: Scalar>(partition: &ClusterPartition) -> BlockMatrix<T> {
    let mut m = BlockMatrix::new(partition.dim(), partition.box_radius());
    for c in partition.clusters() {
        let v = T::from_i64(c.big_m_alpha * c.big_m_alpha);
        if v.is_zero() {
            continue;
        }
        for j in &c.members {
            m.entries.insert((j.clone(), j.clone()), Complex::new(v.clone(), T::zero()));
        }
    }
    m
}

/// `c`, `C` with `c⟨j⟩^r ≤ ⟨M_α⟩^r ≤ C⟨j⟩^r` on the box, `⟨x⟩ = max(1, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEquivalence {
    pub r: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Per-mode ratio of the `𝒟^{r/2}` weight to the Sobolev weight, over the interior clusters.
pub fn d_operator_norm_equivalence(partition: &ClusterPartition, r: f64) -> NormEquivalence {
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    for c in partition.clusters().iter().filter(|c| !c.boundary) {
        let big = c.big_m_alpha.max(1) as f64;
        for j in &c.members {
            let ratio = (big / sup_norm(j).max(1) as f64).powf(r);
            lower = lower.min(ratio);
            upper = upper.max(ratio);
        }
    }
    if lower.is_infinite() {
        lower = 1.0;
        upper = 1.0;
    }
    NormEquivalence { r, lower, upper }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub sigma: f64,
    /// `(N, sup |Q_j^j'| (1 + |j - j'|)^N / (1 + |j| + |j'|)^σ)`.
    pub seminorms: Vec<(u32, f64)>,
}

pub fn decay_profile<T: Scalar>(q: &BlockMatrix<T>, sigma: f64, orders: &[u32]) -> DecayProfile {
    let seminorms = orders
        .iter()
        .map(|&n| {
            let sup = q
                .iter()
                .map(|(a, b, v)| {
                    let far = (1 + sup_dist(a, b)) as f64;
                    let size = (1 + sup_norm(a) + sup_norm(b)) as f64;
                    abs_f64(v) * far.powi(n as i32) / size.powf(sigma)
                })
                .fold(0.0, f64::max);
            (n, sup)
        })
        .collect();
    DecayProfile { sigma, seminorms }
}

/// `|Q|_s = (Σ_h max(1, |h|)^{2s} (sup_{j - j' = h} |Q_j^j'|)²)^{1/2}`, space-only.
pub fn s_decay_norm<T: Scalar>(q: &BlockMatrix<T>, s: f64) -> f64 {
    let mut diag_sup: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    for (a, b, v) in q.iter() {
        let h: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let slot = diag_sup.entry(h).or_insert(0.0);
        *slot = slot.max(abs_f64(v));
    }
    diag_sup
        .iter()
        .map(|(h, sup)| (sup_norm(h).max(1) as f64).powf(2.0 * s) * sup * sup)
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub checked: usize,
    /// Entries of `R` with `|j - j'| < ½ (|j| + |j'|)^δ`.
    pub violations: Vec<(Vec<i64>, Vec<i64>)>,
}

pub fn verify_r_support<T: Scalar>(solution: &HomologicalSolution<T>, partition: &ClusterPartition, delta: f64) -> Result<SupportReport> {
    check_box(&solution.r, partition)?;
    let exp = Exponent::from_f64(delta)?;
    let mut violations = Vec::new();
    for (a, b, _) in solution.r.iter() {
        let twice = Rational::from_i64(2 * sup_dist(a, b));
        let s = (sup_norm(a) + sup_norm(b)) as u64;
        if twice.cmp_power(s, &exp) == Ordering::Less {
            violations.push((a.clone(), b.clone()));
        }
    }
    Ok(SupportReport {
        checked: solution.r.nnz(),
        violations,
    })
}

/// Entries of `X` with `|X| > 4|W|(|j| + |j'|)^{-δ}`; empty for any output of [`solve_homological`].
pub fn x_bound_violations<T: Scalar>(w_nd: &BlockMatrix<T>, solution: &HomologicalSolution<T>) -> Vec<(Vec<i64>, Vec<i64>)> {
    solution
        .x
        .iter()
        .filter(|(a, b, v)| {
            let s = (sup_norm(a) + sup_norm(b)) as f64;
            let bound = 4.0 * abs_f64(&w_nd.get(a, b)) * s.powf(-solution.delta.value());
            abs_f64(v) > bound * (1.0 + 1e-9)
        })
        .map(|(a, b, _)| (a.clone(), b.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{build_partition_with, DeltaPolicy};
    use crate::lattice::RationalLattice;
    use crate::scalar::parse_rational;

    type Q = Rational;

    fn c(re: i64) -> Complex<Q> {
        Complex::new(Q::from_i64(re), Q::zero())
    }

    fn partition(d: usize, n: i64) -> ClusterPartition {
        build_partition_with(&RationalLattice::identity(d), n, 0.1, DeltaPolicy::Exploratory).unwrap()
    }

    #[test]
    fn split_of_diagonal_is_all_diagonal() {
        let p = partition(1, 6);
        let id = BlockMatrix::<Q>::identity(1, 6);
        let (d, nd) = dn_split(&id, &p).unwrap();
        assert!(nd.is_zero());
        assert_eq!(d, id);
    }

    #[test]
    fn box_mismatch_detected() {
        let p = partition(1, 6);
        let m = BlockMatrix::<Q>::identity(1, 5);
        assert!(matches!(dn_split(&m, &p), Err(Error::BoxMismatch { .. })));
    }

    #[test]
    fn far_entry_goes_to_x() {
        let basis = RationalLattice::identity(2);
        let p = build_partition_with(&basis, 6, 0.1, DeltaPolicy::Exploratory).unwrap();
        let mut w = BlockMatrix::<Q>::new(2, 6);
        w.set(&[0, 0], &[3, 4], c(1)).unwrap();
        let sol = solve_homological(&basis, &w, &p, 0.1).unwrap();
        assert_eq!(sol.x.get(&[0, 0], &[3, 4]).re, parse_rational("1/25").unwrap());
        assert!(sol.r.is_zero());
    }

    #[test]
    fn equal_eigenvalues_go_to_r() {
        let basis = RationalLattice::identity(2);
        let p = build_partition_with(&basis, 6, 0.1, DeltaPolicy::Exploratory).unwrap();
        assert_ne!(p.cluster_of(&[0, 5]), p.cluster_of(&[3, 4]));
        let mut w = BlockMatrix::<Q>::new(2, 6);
        w.set(&[0, 5], &[3, 4], c(2)).unwrap();
        let sol = solve_homological(&basis, &w, &p, 0.1).unwrap();
        assert!(sol.x.is_zero());
        assert_eq!(sol.r.get(&[0, 5], &[3, 4]), c(-2));
        let check = check_homological(&basis, &w, &sol);
        assert!(check.exact && check.supports_disjoint && check.supports_cover);
    }

    #[test]
    fn intra_cluster_entry_rejected() {
        let basis = RationalLattice::identity(1);
        let p = partition(1, 6);
        let mut w = BlockMatrix::<Q>::new(1, 6);
        w.set(&[0], &[1], c(1)).unwrap();
        assert!(matches!(
            solve_homological(&basis, &w, &p, 0.1),
            Err(Error::IntraClusterEntry { .. })
        ));
    }

    #[test]
    fn d_operator_values() {
        let p = partition(1, 6);
        let d = build_d_operator::<Q>(&p);
        for j in [-1, 0, 1] {
            assert_eq!(d.get(&[j], &[j]), c(1));
        }
        assert_eq!(d.get(&[3], &[3]), c(9));
    }

    #[test]
    fn injected_near_diagonal_remainder_flagged() {
        let p = partition(1, 6);
        let mut r = BlockMatrix::<Q>::new(1, 6);
        r.set(&[5], &[4], c(1)).unwrap();
        let sol = HomologicalSolution {
            x: BlockMatrix::new(1, 6),
            r,
            delta: Exponent::from_f64(0.9).unwrap(),
        };
        let rep = verify_r_support(&sol, &p, 0.9).unwrap();
        assert_eq!(rep.violations, vec![(vec![5], vec![4])]);
    }

    #[test]
    fn decay_of_identity_and_single_entry() {
        let id = BlockMatrix::<Q>::identity(1, 3);
        let prof = decay_profile(&id, 1.0, &[0, 2]);
        assert!(prof.seminorms.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-15));
        let mut m = BlockMatrix::<Q>::new(1, 5);
        m.set(&[-2], &[3], c(1)).unwrap();
        let prof = decay_profile(&m, 0.5, &[3]);
        let expected = (1.0f64 + 5.0).powi(3) / (1.0f64 + 2.0 + 3.0).powf(0.5);
        assert!((prof.seminorms[0].1 - expected).abs() < 1e-12);
        assert!((s_decay_norm(&m, 1.0) - 5.0).abs() < 1e-12);
        assert_eq!(s_decay_norm(&BlockMatrix::<Q>::new(1, 2), 3.0), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let mut m = BlockMatrix::<Q>::new(2, 2);
        m.set(&[0, 1], &[1, -1], Complex::new(parse_rational("1/3").unwrap(), Q::from_i64(-2))).unwrap();
        assert_eq!(BlockMatrix::<Q>::from_json(&m.to_json()).unwrap(), m);
    }
}
