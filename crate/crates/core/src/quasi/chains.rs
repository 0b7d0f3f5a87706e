use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::{dist, dot, FrequencyParams, SpaceTimeSite, SymbolKind};
use super::symbols::is_singular;
use crate::boxes::IndexBox;
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
use crate::scalar::Scalar;
use crate::search::{extend_to_maximal, longest_path_per_component, SearchLimits};

/// `ℓ ∈ [−N_ℓ, N_ℓ]^n`, `j ∈ [−N_j, N_j]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteBox {
    pub ell_radius: i64,
    pub j_radius: i64,
}

impl SiteBox {
    pub fn new(ell_radius: i64, j_radius: i64) -> Self {
        Self { ell_radius, j_radius }
    }
}

/// Singular sites of the box in lexicographic `(ℓ, j, 𝔞)` order.
pub fn enumerate_singular_sites<T: Scalar>(
    basis: &LatticeBasis<T>,
    params: &FrequencyParams<T>,
    kind: SymbolKind,
    sites: &SiteBox,
) -> Result<Vec<SpaceTimeSite>> {
    if sites.ell_radius < 0 || sites.j_radius < 0 {
        return Err(Error::InvalidParameter("box radii must be nonnegative".into()));
    }
    let ells: Vec<Vec<i64>> = IndexBox::cube(params.n(), sites.ell_radius).points().collect();
    let js: Vec<Vec<i64>> = IndexBox::cube(basis.dim(), sites.j_radius).points().collect();
    let mus: Vec<T> = js.iter().map(|j| basis.form(j, j)).collect();
    let one = T::one();
    let slices: Vec<Vec<SpaceTimeSite>> = ells
        .par_iter()
        .map(|ell| {
            let x = params.lambda().clone() * dot(params.omega_bar(), ell) + params.theta().clone();
            let mut out = Vec::new();
            for (j, mu) in js.iter().zip(&mus) {
                let base = mu.clone() + params.mass().clone();
                for &a in kind.signs() {
                    let value = match kind {
                        SymbolKind::Nlw => base.clone() - x.clone() * x.clone(),
                        SymbolKind::Nls => base.clone() - T::from_i64(a as i64) * x.clone(),
                    };
                    if value.abs() < one {
                        out.push(SpaceTimeSite::new(ell.clone(), j.clone(), a));
                    }
                }
            }
            out
        })
        .collect();
    Ok(slices.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularChain {
    pub sites: Vec<SpaceTimeSite>,
    pub gamma: f64,
    pub length: usize,
    /// Largest number of chain sites sharing one `j`.
    pub section_multiplicity: usize,
}

impl SingularChain {
    pub fn new(sites: Vec<SpaceTimeSite>, gamma: f64) -> Self {
        let mut sections: HashMap<&[i64], usize> = HashMap::new();
        for s in &sites {
            *sections.entry(&s.j).or_default() += 1;
        }
        let section_multiplicity = sections.values().copied().max().unwrap_or(0);
        Self {
            length: sites.len().saturating_sub(1),
            section_multiplicity,
            sites,
            gamma,
        }
    }

    /// `ln L / ln(max(K, 2) Γ)`, the exponent at which `L ≤ (max(K,2)Γ)^C` is tight; 0 for `L ≤ 1`.
    pub fn fitted_exponent(&self) -> f64 {
        if self.length <= 1 {
            return 0.0;
        }
        (self.length as f64).ln() / self.scale().ln()
    }

    /// `max(K, 2) Γ`.
    pub fn scale(&self) -> f64 {
        self.section_multiplicity.max(2) as f64 * self.gamma
    }

    pub fn satisfies_bound(&self, exponent: f64) -> bool {
        self.length as f64 <= self.scale().powf(exponent) * (1.0 + 1e-12)
    }

    /// Distinct singular sites with consecutive distance at most `Γ`.
    pub fn is_valid<T: Scalar>(&self, basis: &LatticeBasis<T>, params: &FrequencyParams<T>, kind: SymbolKind) -> bool {
        let mut sorted = self.sites.clone();
        sorted.sort();
        sorted.dedup();
        sorted.len() == self.sites.len()
            && self.sites.iter().all(|s| is_singular(basis, params, s, kind))
            && self.sites.windows(2).all(|w| dist(&w[0], &w[1]) as f64 <= self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub chain: SingularChain,
    /// The component search stopped early, so a longer chain may exist there.
    pub truncated: bool,
    pub fitted_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEnumeration {
    pub kind: SymbolKind,
    pub gamma: f64,
    pub singular_sites: usize,
    /// One maximal chain per connected component of the link graph.
    pub chains: Vec<ChainRecord>,
    /// Largest per-chain fitted exponent.
    pub fitted_exponent: f64,
    pub truncated: bool,
}

impl ChainEnumeration {
    /// Indices of chains with `L > (max(K,2)Γ)^exponent`.
    pub fn bound_violations(&self, exponent: f64) -> Vec<usize> {
        (0..self.chains.len())
            .filter(|&i| !self.chains[i].chain.satisfies_bound(exponent))
            .collect()
    }

    /// Turns a truncated search into [`Error::SearchTruncated`].
    pub fn require_complete(self) -> Result<Self> {
        match self.chains.iter().find(|c| c.truncated) {
            Some(c) => Err(Error::SearchTruncated {
                length: c.chain.length,
                chain: c
                    .chain
                    .sites
                    .iter()
                    .map(|s| s.ell.iter().chain(&s.j).copied().chain([s.a as i64]).collect())
                    .collect(),
            }),
            None => Ok(self),
        }
    }
}

/// Adjacency of the `Γ`-link graph on a site list.
pub fn singular_link_graph(sites: &[SpaceTimeSite], gamma: f64) -> Vec<Vec<usize>> {
    let reach = gamma.floor() as i64;
    let mut by_point: HashMap<(&[i64], &[i64]), Vec<usize>> = HashMap::new();
    for (i, s) in sites.iter().enumerate() {
        by_point.entry((&s.ell, &s.j)).or_default().push(i);
    }
    let Some(first) = sites.first() else {
        return Vec::new();
    };
    let (n, d) = (first.ell.len(), first.j.len());
    let offsets = IndexBox::cube(n + d, reach.max(0));
    let linked = |i: usize, k: usize| i != k && dist(&sites[i], &sites[k]) as f64 <= gamma;
    if offsets.len() >= sites.len() {
        return (0..sites.len())
            .into_par_iter()
            .map(|i| (0..sites.len()).filter(|&k| linked(i, k)).collect())
            .collect();
    }
    (0..sites.len())
        .into_par_iter()
        .map(|i| {
            let s = &sites[i];
            let mut out = Vec::new();
            for off in offsets.points() {
                let ell: Vec<i64> = s.ell.iter().zip(&off[..n]).map(|(a, b)| a + b).collect();
                let j: Vec<i64> = s.j.iter().zip(&off[n..]).map(|(a, b)| a + b).collect();
                if let Some(ks) = by_point.get(&(ell.as_slice(), j.as_slice())) {
                    out.extend(ks.iter().copied().filter(|&k| linked(i, k)));
                }
            }
            out.sort_unstable();
            out
        })
        .collect()
}

/// One maximal `Γ`-chain of singular sites per component of the link graph, with its statistics.
///
/// Each chain is a longest path of its component when the search is not truncated,
/// and is oriented so that its lexicographically smaller endpoint comes first.
pub fn enumerate_singular_chains<T: Scalar>(
    basis: &LatticeBasis<T>,
    params: &FrequencyParams<T>,
    kind: SymbolKind,
    sites: &SiteBox,
    gamma: f64,
    limits: &SearchLimits,
) -> Result<ChainEnumeration> {
    if !(gamma >= 2.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("link radius {gamma} below 2")));
    }
    let all = enumerate_singular_sites(basis, params, kind, sites)?;
    chains_from_sites(kind, &all, gamma, limits)
}

/// Same as [`enumerate_singular_chains`] for an already enumerated site list.
pub fn chains_from_sites(
    kind: SymbolKind,
    all: &[SpaceTimeSite],
    gamma: f64,
    limits: &SearchLimits,
) -> Result<ChainEnumeration> {
    if !(gamma >= 2.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("link radius {gamma} below 2")));
    }
    let adj = singular_link_graph(all, gamma);
    let paths = longest_path_per_component(&adj, limits);
    let chains: Vec<ChainRecord> = paths
        .into_iter()
        .map(|mut res| {
            extend_to_maximal(&adj, &mut res.path);
            let mut seq: Vec<SpaceTimeSite> = res.path.iter().map(|&i| all[i].clone()).collect();
            if seq.last() < seq.first() {
                seq.reverse();
            }
            let chain = SingularChain::new(seq, gamma);
            ChainRecord {
                fitted_exponent: chain.fitted_exponent(),
                truncated: res.truncated,
                chain,
            }
        })
        .collect();
    Ok(ChainEnumeration {
        kind,
        gamma,
        singular_sites: all.len(),
        fitted_exponent: chains.iter().map(|c| c.fitted_exponent).fold(0.0, f64::max),
        truncated: chains.iter().any(|c| c.truncated),
        chains,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairBound {
    pub q0: usize,
    pub q: usize,
    pub lhs: f64,
    /// `lhs / (|q − q₀|² Γ²)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainBoundData {
    pub pairs: Vec<PairBound>,
    /// Smallest `C` with `lhs ≤ C |q − q₀|² Γ²` over all pairs.
    pub constant: f64,
}

/// Quadratic bilinear bound along a chain, for all ordered pairs `q ≠ q₀`.
///
/// For NLW the left side is `|φ((x_{q₀}, j_{q₀}), (x_q − x_{q₀}, j_q − j_{q₀}))|` with
/// `x_q = λω̄·ℓ_q + θ` and `φ((x,y),(x',y')) = −xx' + ⟨Wy, Wy'⟩`; for NLS it is `|⟨j_{q₀}, j_q − j_{q₀}⟩|`.
pub fn chain_bound_data<T: Scalar>(
    basis: &LatticeBasis<T>,
    params: &FrequencyParams<T>,
    kind: SymbolKind,
    chain: &SingularChain,
) -> Result<ChainBoundData> {
    let xs: Vec<T> = chain.sites.iter().map(|s| params.phase(&s.ell)).collect::<Result<_>>()?;
    for s in &chain.sites {
        if s.j.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: s.j.len(),
            });
        }
    }
    let len = chain.sites.len();
    let g2 = chain.gamma * chain.gamma;
    let pairs: Vec<PairBound> = (0..len)
        .into_par_iter()
        .flat_map_iter(|q0| {
            let j0 = &chain.sites[q0].j;
            let xs = &xs;
            (0..len).filter(move |&q| q != q0).map(move |q| {
                let dj: Vec<i64> = chain.sites[q].j.iter().zip(j0).map(|(a, b)| a - b).collect();
                let mut value = basis.form(j0, &dj);
                if kind == SymbolKind::Nlw {
                    value = value - xs[q0].clone() * (xs[q].clone() - xs[q0].clone());
                }
                let lhs = value.abs().to_f64();
                let steps = q.abs_diff(q0) as f64;
                PairBound {
                    q0,
                    q,
                    lhs,
                    ratio: lhs / (steps * steps * g2),
                }
            })
        })
        .collect();
    Ok(ChainBoundData {
        constant: pairs.iter().map(|p| p.ratio).fold(0.0, f64::max),
        pairs,
    })
}

pub fn nls_chain_bound_data<T: Scalar>(
    basis: &LatticeBasis<T>,
    params: &FrequencyParams<T>,
    chain: &SingularChain,
) -> Result<ChainBoundData> {
    chain_bound_data(basis, params, SymbolKind::Nls, chain)
}

pub fn nlw_chain_bound_data<T: Scalar>(
    basis: &LatticeBasis<T>,
    params: &FrequencyParams<T>,
    chain: &SingularChain,
) -> Result<ChainBoundData> {
    chain_bound_data(basis, params, SymbolKind::Nlw, chain)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCheck {
    /// Largest `|−𝔞_{q+1} ω·(ℓ_{q+1} − ℓ_q) + μ_{q+1} − 𝔞_{q+1}𝔞_q μ_q|`.
    pub max_combination: f64,
    /// `2(|m| + 1)`.
    pub combination_bound: f64,
    /// Largest `|μ_{q+1} − μ_q|`.
    pub max_mu_jump: f64,
    /// `2(|m| + 1) + λ|ω̄|₁Γ`, which bounds every `|μ_{q+1} − μ_q|`.
    pub mu_jump_bound: f64,
    /// Steps `q` where either bound fails.
    pub violations: Vec<usize>,
}

/// The `θ`-independent consecutive-site inequalities of an NLS chain.
pub fn nls_step_check<T: Scalar>(
    basis: &LatticeBasis<T>,
    params: &FrequencyParams<T>,
    chain: &SingularChain,
) -> Result<StepCheck> {
    let two = T::from_i64(2);
    let bound = two * (params.mass().abs() + T::one());
    let l1 = params.omega_bar().iter().fold(T::zero(), |acc, w| acc + w.abs());
    let jump_bound = bound.to_f64() + params.lambda().to_f64() * l1.to_f64() * chain.gamma;
    let mut out = StepCheck {
        max_combination: 0.0,
        combination_bound: bound.to_f64(),
        max_mu_jump: 0.0,
        mu_jump_bound: jump_bound,
        violations: Vec::new(),
    };
    for (q, w) in chain.sites.windows(2).enumerate() {
        let (s, t) = (&w[0], &w[1]);
        let dl: Vec<i64> = t.ell.iter().zip(&s.ell).map(|(a, b)| a - b).collect();
        let step = params.lambda().clone() * params.omega_bar_dot(&dl)?;
        let (mu_s, mu_t) = (basis.mu(&s.j)?, basis.mu(&t.j)?);
        let a_t = T::from_i64(t.a as i64);
        let comb = (mu_t.clone() - a_t.clone() * step - a_t * T::from_i64(s.a as i64) * mu_s.clone()).abs();
        let jump = (mu_t - mu_s).abs();
        out.max_combination = out.max_combination.max(comb.to_f64());
        out.max_mu_jump = out.max_mu_jump.max(jump.to_f64());
        if comb > bound || jump.to_f64() > jump_bound * (1.0 + 1e-12) {
            out.violations.push(q);
        }
    }
    Ok(out)
}

/// Number of chain sites per `j`, sorted by `j`.
pub fn section_counts(chain: &SingularChain) -> BTreeMap<Vec<i64>, usize> {
    let mut out = BTreeMap::new();
    for s in &chain.sites {
        *out.entry(s.j.clone()).or_default() += 1;
    }
    out
}
