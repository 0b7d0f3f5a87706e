use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxes::{sup_dist, IndexBox};
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
use crate::scalar::Scalar;
use crate::search::{longest_path, SearchLimits};

/// `C₁(d) = 2(2d+1)d`, the exponent in the chain-length bound `L ≤ C₂ Γ^{C₁}`.
pub fn chain_exponent(d: usize) -> usize {
    2 * (2 * d + 1) * d
}

/// `(j, μ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiPoint<T: Scalar> {
    pub j: Vec<i64>,
    pub mu: T,
}

pub fn phi<T: Scalar>(basis: &LatticeBasis<T>, j: &[i64]) -> Result<PhiPoint<T>> {
    Ok(PhiPoint {
        j: j.to_vec(),
        mu: basis.mu(j)?,
    })
}

/// Sup-norm of `Φ(j') - Φ(j)` is at most `gamma`.
///
/// # Panics
/// Panics if `j == j2`; chains consist of distinct points.
pub fn is_gamma_link<T: Scalar>(basis: &LatticeBasis<T>, j: &[i64], j2: &[i64], gamma: f64) -> Result<bool> {
    assert!(j != j2, "a link needs two distinct points");
    let dmu = (basis.mu(j2)? - basis.mu(j)?).abs();
    Ok(link_within(sup_dist(j, j2), &dmu, gamma))
}

fn link_within<T: Scalar>(dj: i64, dmu: &T, gamma: f64) -> bool {
    if dj as f64 > gamma {
        return false;
    }
    match T::from_f64(gamma) {
        Some(g) => *dmu <= g,
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaChain {
    pub sites: Vec<Vec<i64>>,
    pub gamma: f64,
}

impl GammaChain {
    pub fn length(&self) -> usize {
        self.sites.len().saturating_sub(1)
    }

    /// Distinct sites and every consecutive pair a `Γ`-link.
    pub fn is_valid<T: Scalar>(&self, basis: &LatticeBasis<T>) -> bool {
        let mut sorted = self.sites.clone();
        sorted.sort();
        sorted.dedup();
        sorted.len() == self.sites.len()
            && self
                .sites
                .windows(2)
                .all(|w| is_gamma_link(basis, &w[0], &w[1], self.gamma).unwrap_or(false))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSearch {
    pub max_length: usize,
    pub witness: GammaChain,
    /// The search hit its budget or cap, so `max_length` is only a lower bound.
    pub truncated: bool,
    pub expansions: u64,
}

/// Adjacency of the `Γ`-link graph on the cube `[-N, N]^d`.
pub fn gamma_link_graph<T: Scalar>(basis: &LatticeBasis<T>, radius: i64, gamma: f64) -> (IndexBox, Vec<Vec<usize>>) {
    let grid = IndexBox::cube(basis.dim(), radius);
    let mus: Vec<T> = grid.points().map(|j| basis.form(&j, &j)).collect();
    let reach = gamma.floor() as i64;
    let adj = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let j = grid.point(i);
            grid.neighbours(&j, reach)
                .into_iter()
                .filter(|&k| link_within(sup_dist(&j, &grid.point(k)), &(mus[k].clone() - mus[i].clone()).abs(), gamma))
                .collect()
        })
        .collect();
    (grid, adj)
}

/// Longest `Γ`-chain inside `[-N, N]^d`, with the search outcome flagged.
pub fn search_max_chain<T: Scalar>(
    basis: &LatticeBasis<T>,
    radius: i64,
    gamma: f64,
    limits: &SearchLimits,
) -> Result<ChainSearch> {
    if radius < 1 {
        return Err(Error::InvalidParameter(format!("box radius {radius} must be >= 1")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("link radius {gamma} must be positive")));
    }
    let (grid, adj) = gamma_link_graph(basis, radius, gamma);
    let best = longest_path(&adj, limits);
    Ok(ChainSearch {
        max_length: best.length(),
        witness: GammaChain {
            sites: best.path.iter().map(|&i| grid.point(i)).collect(),
            gamma,
        },
        truncated: best.truncated,
        expansions: best.expansions,
    })
}

/// Like [`search_max_chain`], but a truncated search is an error carrying the best chain.
pub fn max_chain_length<T: Scalar>(
    basis: &LatticeBasis<T>,
    radius: i64,
    gamma: f64,
    limits: &SearchLimits,
) -> Result<ChainSearch> {
    let out = search_max_chain(basis, radius, gamma, limits)?;
    if out.truncated {
        return Err(Error::SearchTruncated {
            length: out.max_length,
            chain: out.witness.sites,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub gamma: f64,
    pub max_length: usize,
    pub witness_valid: bool,
    /// `max_length` is only a lower bound.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `ln L*` against `ln Γ`; `None` with fewer than two usable rows.
    pub slope: Option<f64>,
    pub exponent_bound: usize,
    pub within_bound: bool,
    pub monotone: bool,
}

pub fn chain_scaling_experiment<T: Scalar>(
    basis: &LatticeBasis<T>,
    gammas: &[f64],
    radius: i64,
    limits: &SearchLimits,
) -> Result<ScalingTable> {
    if let Some(g) = gammas.iter().find(|&&g| g < 2.0) {
        return Err(Error::InvalidParameter(format!("link radius {g} below 2")));
    }
    let results: Vec<ChainSearch> = gammas
        .par_iter()
        .map(|&g| search_max_chain(basis, radius, g, limits))
        .collect::<Result<_>>()?;
    let rows: Vec<ScalingRow> = results
        .iter()
        .map(|r| ScalingRow {
            gamma: r.witness.gamma,
            max_length: r.max_length,
            witness_valid: r.witness.is_valid(basis),
            truncated: r.truncated,
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.max_length > 0)
        .map(|r| (r.gamma.ln(), (r.max_length as f64).ln()))
        .collect();
    let slope = least_squares_slope(&pts);
    let exponent_bound = chain_exponent(basis.dim());
    let mut by_gamma = rows.clone();
    by_gamma.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    Ok(ScalingTable {
        monotone: by_gamma.windows(2).all(|w| w[0].max_length <= w[1].max_length),
        within_bound: slope.is_none_or(|s| s <= exponent_bound as f64),
        slope,
        exponent_bound,
        rows,
    })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RationalLattice;
    use crate::scalar::{parse_rational, Rational};

    #[test]
    fn phi_values() {
        let one = RationalLattice::identity(1);
        assert_eq!(phi(&one, &[3]).unwrap().mu, Rational::from_i64(9));
        let rect = RationalLattice::rectangular(&[parse_rational("1").unwrap(), parse_rational("2").unwrap()]).unwrap();
        assert_eq!(phi(&rect, &[0, 2]).unwrap().mu, Rational::from_i64(1));
    }

    #[test]
    fn link_examples() {
        let b = RationalLattice::identity(1);
        assert!(is_gamma_link(&b, &[0], &[1], 2.0).unwrap());
        assert!(!is_gamma_link(&b, &[1], &[2], 2.0).unwrap());
        assert_eq!(
            is_gamma_link(&b, &[5], &[7], 30.0).unwrap(),
            is_gamma_link(&b, &[7], &[5], 30.0).unwrap()
        );
    }

    #[test]
    #[should_panic]
    fn link_needs_distinct_points() {
        let b = RationalLattice::identity(1);
        let _ = is_gamma_link(&b, &[1], &[1], 2.0);
    }

    #[test]
    fn short_chains_in_one_dimension() {
        let b = RationalLattice::identity(1);
        let two = max_chain_length(&b, 10, 2.0, &SearchLimits::default()).unwrap();
        assert_eq!(two.max_length, 2);
        let mut sites = two.witness.sites.clone();
        sites.sort();
        assert_eq!(sites, vec![vec![-1], vec![0], vec![1]]);
        // -1, 0, 1 is also a chain at radius 1: both links have |Δj| = |Δμ| = 1
        let one = max_chain_length(&b, 10, 1.0, &SearchLimits::default()).unwrap();
        assert_eq!(one.max_length, 2);
        assert!(one.witness.is_valid(&b));
    }

    #[test]
    fn huge_radius_links_whole_box() {
        let b = RationalLattice::identity(2);
        let r = max_chain_length(&b, 2, 100.0, &SearchLimits::default()).unwrap();
        assert_eq!(r.max_length, 24);
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<_> = [1.0f64, 2.0, 4.0].iter().map(|&x: &f64| (x.ln(), 3.0 * x.ln() + 1.0)).collect();
        assert!((least_squares_slope(&pts).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(least_squares_slope(&pts[..1]), None);
    }
}
