use serde::{Deserialize, Serialize};

use super::params::{FrequencyParams, SpaceTimeSite, SymbolKind};
use super::symbols::symbol;
use crate::boxes::IndexBox;
use crate::error::{Error, Result};
use crate::intervals::Interval;
use crate::lattice::LatticeBasis;
use crate::scalar::Scalar;

/// `2([1/√m] + 1)`.
pub fn cover_count_bound(mass: f64) -> usize {
    2 * ((1.0 / mass.sqrt()).floor() as usize + 1)
}

/// Intervals covering `{θ : |D_{ℓ,j,𝔞}(λ, θ)| ≤ N^{−τ₁}}`.
///
/// For NLW the set is `{θ : μ_j + m − ε ≤ (c + θ)² ≤ μ_j + m + ε}` with `c = λω̄·ℓ`,
/// `ε = N^{−τ₁}`: two intervals between the roots, or one when `μ_j + m ≤ ε`.
/// For NLS it is the single interval of half-width `ε` around `𝔞(μ_j + m) − c`.
pub fn hypothesis2_cover<T: Scalar>(
    basis: &LatticeBasis<T>,
    params: &FrequencyParams<T>,
    kind: SymbolKind,
    site: &SpaceTimeSite,
    n_big: f64,
    tau1: f64,
) -> Result<Vec<Interval>> {
    if !(n_big > 1.0) {
        return Err(Error::InvalidParameter(format!("N = {n_big} must exceed 1")));
    }
    let eps = n_big.powf(-tau1);
    let c = (params.lambda().clone() * params.omega_bar_dot(&site.ell)?).to_f64();
    let s = (basis.mu(&site.j)? + params.mass().clone()).to_f64();
    Ok(match kind {
        SymbolKind::Nlw => {
            let outer = (s + eps).sqrt();
            if s - eps > 0.0 {
                let inner = (s - eps).sqrt();
                vec![Interval::new(-outer - c, -inner - c), Interval::new(inner - c, outer - c)]
            } else {
                vec![Interval::new(-outer - c, outer - c)]
            }
        }
        SymbolKind::Nls => {
            if site.a != 1 && site.a != -1 {
                return Err(Error::InvalidParameter(format!("sign {} must be +1 or -1", site.a)));
            }
            vec![Interval::centered(site.a as f64 * s - c, eps)]
        }
    })
}

/// Splits every interval into equal pieces of length at most `max_len`.
pub fn refine_cover(cover: &[Interval], max_len: f64) -> Vec<Interval> {
    let mut out = Vec::new();
    for iv in cover {
        let pieces = ((iv.len() / max_len).ceil() as usize).max(1);
        let step = iv.len() / pieces as f64;
        for k in 0..pieces {
            let lo = iv.lo + step * k as f64;
            let hi = if k + 1 == pieces { iv.hi } else { lo + step };
            out.push(Interval::new(lo, hi));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarLambdaCheck {
    pub member: bool,
    /// First site in lexicographic order with `|D_k(λ)| < N₀^{−τ}`.
    pub witness: Option<SpaceTimeSite>,
    pub min_abs_symbol: f64,
    pub checked: u64,
}

/// `|D_k(λ)| ≥ N₀^{−τ}` at `θ = 0` for every site with `max(|ℓ|, |j|) ≤ N₀`.
pub fn bar_lambda_membership<T: Scalar>(
    basis: &LatticeBasis<T>,
    params: &FrequencyParams<T>,
    kind: SymbolKind,
    n0: i64,
    tau: f64,
) -> Result<BarLambdaCheck> {
    if n0 < 1 {
        return Err(Error::InvalidParameter(format!("N0 = {n0} must be >= 1")));
    }
    let at_zero = params.clone().with_theta(T::zero());
    let threshold = (n0 as f64).powf(-tau);
    let n = params.n();
    let grid = IndexBox::cube(n + basis.dim(), n0);
    let mut out = BarLambdaCheck {
        member: true,
        witness: None,
        min_abs_symbol: f64::INFINITY,
        checked: 0,
    };
    for point in grid.points() {
        for &a in kind.signs() {
            let site = SpaceTimeSite::new(point[..n].to_vec(), point[n..].to_vec(), a);
            let v = symbol(basis, &at_zero, &site, kind)?.abs();
            out.checked += 1;
            let vf = v.to_f64();
            out.min_abs_symbol = out.min_abs_symbol.min(vf);
            let below = match T::from_f64(threshold) {
                Some(t) if T::EXACT => v < t,
                _ => vf < threshold,
            };
            if below && out.witness.is_none() {
                out.member = false;
                out.witness = Some(site);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RationalLattice;
    use crate::scalar::{parse_rational, Rational};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn params(lambda: &str, mass: &str) -> FrequencyParams<Rational> {
        FrequencyParams::new(vec![q("1")], 0.5, 1.0, q(lambda), q("0"), q(mass)).unwrap()
    }

    #[test]
    fn wave_roots_near_plus_minus_one() {
        let b = RationalLattice::identity(1);
        let site = SpaceTimeSite::wave(vec![0], vec![0]);
        let cover = hypothesis2_cover(&b, &params("1", "1"), SymbolKind::Nlw, &site, 10.0, 2.0).unwrap();
        assert_eq!(cover.len(), 2);
        assert!(cover[0].contains(-1.0) && cover[1].contains(1.0));
        // 2ε / (√(1+ε) + √(1−ε)) is a hair above ε = ε/√m here
        for iv in &cover {
            assert!((iv.len() - 0.01).abs() < 1e-6);
            assert!(iv.len() > 0.01);
        }
        assert_eq!(refine_cover(&cover, 0.01).len(), 4);
    }

    #[test]
    fn wave_away_from_zero_mode_meets_length_bound() {
        let b = RationalLattice::identity(1);
        let site = SpaceTimeSite::wave(vec![3], vec![2]);
        let p = params("3/4", "1/2");
        let cover = hypothesis2_cover(&b, &p, SymbolKind::Nlw, &site, 8.0, 1.5).unwrap();
        let eps = 8f64.powf(-1.5);
        assert_eq!(cover.len(), 2);
        assert!(cover.iter().all(|iv| iv.len() <= eps / 0.5f64.sqrt()));
        assert!(cover.len() <= cover_count_bound(0.5));
    }

    #[test]
    fn schroedinger_cover_has_width_two_eps() {
        let b = RationalLattice::identity(1);
        let site = SpaceTimeSite::new(vec![2], vec![1], -1);
        let cover = hypothesis2_cover(&b, &params("1", "1"), SymbolKind::Nls, &site, 10.0, 1.0).unwrap();
        assert_eq!(cover.len(), 1);
        assert!((cover[0].len() - 0.2).abs() < 1e-15);
        assert!(cover[0].contains(-2.0 - 2.0));
    }

    #[test]
    fn bar_lambda_detects_resonance() {
        let b = RationalLattice::identity(1);
        // λ = 1, m = 3: (ℓ)² = j² + 3 at ℓ = 2, j = 1
        let bad = bar_lambda_membership(&b, &params("1", "3"), SymbolKind::Nlw, 2, 1.0).unwrap();
        assert!(!bad.member);
        assert_eq!(bad.min_abs_symbol, 0.0);
        let w = bad.witness.unwrap();
        assert_eq!(w.ell[0].abs(), 2);
        assert_eq!(w.j[0].abs(), 1);
        assert!(bar_lambda_membership(&b, &params("1", "3"), SymbolKind::Nlw, 0, 1.0).is_err());
    }
}
