mod common;

use common::*;
use num::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toruskit::boxes::IndexBox;
use toruskit::quasi::*;
use toruskit::search::{connected_components, SearchLimits};
use toruskit::{Rational, RationalLattice, Scalar};

fn unit_params(theta: &str, mass: &str) -> FrequencyParams<Rational> {
    FrequencyParams::new(vec![q("1")], 0.5, 1.0, q("1"), q(theta), q(mass)).unwrap()
}

fn plane_params() -> FrequencyParams<Rational> {
    FrequencyParams::new(vec![q("2/5"), q("-3/7")], 0.01, 2.0, q("6/5"), q("1/3"), q("3/4")).unwrap()
}

#[test]
fn symbol_reference_values() {
    let b = RationalLattice::identity(1);
    assert_eq!(symbol_nlw(&b, &unit_params("0", "1"), &[1], &[1]).unwrap(), q("1"));
    assert_eq!(symbol_nls(&b, &unit_params("1/2", "1"), &[1], &[0], 1).unwrap(), q("-1/2"));
    assert_eq!(symbol_nlw(&b, &unit_params("0", "7/3"), &[0], &[0]).unwrap(), q("7/3"));
}

#[test]
fn site_enumeration_matches_direct_filter() {
    let basis = skew_lattice();
    let p = plane_params();
    let sb = SiteBox::new(3, 3);
    for kind in [SymbolKind::Nlw, SymbolKind::Nls] {
        let got = enumerate_singular_sites(&basis, &p, kind, &sb).unwrap();
        let mut want = Vec::new();
        for ell in IndexBox::cube(2, 3).points() {
            let x = q("6/5") * (q("2/5") * Rational::from_i64(ell[0]) - q("3/7") * Rational::from_i64(ell[1])) + q("1/3");
            for j in IndexBox::cube(2, 3).points() {
                let base = form_oracle(&basis, &j, &j) + q("3/4");
                for &a in kind.signs() {
                    let v = match kind {
                        SymbolKind::Nlw => base.clone() - x.clone() * x.clone(),
                        SymbolKind::Nls => base.clone() - Rational::from_i64(a as i64) * x.clone(),
                    };
                    if v.abs() < Rational::from_i64(1) {
                        want.push(SpaceTimeSite::new(ell.clone(), j.clone(), a));
                    }
                }
            }
        }
        assert_eq!(got, want, "{kind:?}");
    }
}

#[test]
fn light_cone_on_the_reference_box() {
    let b = RationalLattice::identity(1);
    let p = unit_params("0", "1/2");
    let sites = enumerate_singular_sites(&b, &p, SymbolKind::Nlw, &SiteBox::new(30, 30)).unwrap();
    // ℓ = ±j on |j| ≤ 30, plus (±1, 0)
    assert_eq!(sites.len(), 123);
    let out = enumerate_singular_chains(&b, &p, SymbolKind::Nlw, &SiteBox::new(30, 30), 2.0, &SearchLimits::default())
        .unwrap();
    assert!(!out.truncated);
    assert!(out.fitted_exponent.is_finite() && out.fitted_exponent > 0.0);
    for c in &out.chains {
        assert!(c.chain.is_valid(&b, &p, SymbolKind::Nlw));
    }
}

fn brute_longest(adj: &[Vec<usize>], comp: &[usize]) -> usize {
    fn go(adj: &[Vec<usize>], v: usize, seen: &mut [bool], len: usize, best: &mut usize) {
        *best = (*best).max(len);
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                go(adj, u, seen, len + 1, best);
                seen[u] = false;
            }
        }
    }
    let mut best = 0;
    for &s in comp {
        let mut seen = vec![false; adj.len()];
        seen[s] = true;
        go(adj, s, &mut seen, 0, &mut best);
    }
    best
}

#[test]
fn chains_are_longest_per_component() {
    let b = RationalLattice::identity(1);
    for (kind, theta, sb) in [
        (SymbolKind::Nls, "0", SiteBox::new(12, 3)),
        (SymbolKind::Nls, "1/3", SiteBox::new(12, 3)),
        (SymbolKind::Nlw, "1/4", SiteBox::new(6, 6)),
    ] {
        let p = unit_params(theta, "1/2");
        let sites = enumerate_singular_sites(&b, &p, kind, &sb).unwrap();
        let adj = singular_link_graph(&sites, 2.0);
        for (i, s) in sites.iter().enumerate() {
            for (k, t) in sites.iter().enumerate() {
                assert_eq!(adj[i].contains(&k), i != k && dist(s, t) <= 2, "{s:?} {t:?}");
            }
        }
        let comps = connected_components(&adj);
        let out = enumerate_singular_chains(&b, &p, kind, &sb, 2.0, &SearchLimits::default()).unwrap();
        assert_eq!(out.chains.len(), comps.len());
        for (c, comp) in out.chains.iter().zip(&comps) {
            assert_eq!(c.chain.length, brute_longest(&adj, comp));
            assert!(c.chain.is_valid(&b, &p, kind));
        }
    }
}

#[test]
fn bilinear_bounds_and_steps_on_schroedinger_chains() {
    let b = RationalLattice::identity(1);
    let p = unit_params("1/5", "1/2");
    let out = enumerate_singular_chains(&b, &p, SymbolKind::Nls, &SiteBox::new(40, 40), 4.0, &SearchLimits::default())
        .unwrap();
    for c in &out.chains {
        let data = nls_chain_bound_data(&b, &p, &c.chain).unwrap();
        for pair in &data.pairs {
            let (j0, j) = (c.chain.sites[pair.q0].j[0], c.chain.sites[pair.q].j[0]);
            assert_eq!(pair.lhs, (j0 * (j - j0)).abs() as f64);
            assert!(pair.ratio <= data.constant);
        }
        let steps = nls_step_check(&b, &p, &c.chain).unwrap();
        assert!(steps.violations.is_empty(), "{steps:?}");
    }
}

fn leibniz_det_a(basis: &RationalLattice, data: &ChainBilinearData<Rational>, xi: &Rational) -> Rational {
    let g = data.g();
    let rows: Vec<Vec<Rational>> = (0..g)
        .map(|i| {
            (0..g)
                .map(|k| {
                    let (x, y) = (&data.f_vectors[i], &data.f_vectors[k]);
                    let lam2 = data.lambda.clone() * data.lambda.clone();
                    // x x' is taken at the data's λ², so rescale it to ξ
                    let time = x.0.clone() * y.0.clone() / lam2 * xi.clone();
                    form_oracle(basis, &x.1, &y.1) - time
                })
                .collect()
        })
        .collect();
    leibniz_det(&rows)
}

#[test]
fn determinant_identity_against_leibniz() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let b = RationalLattice::identity(3);
    let mut done = 0;
    while done < 30 {
        let g = rng.random_range(1..=4);
        let omega = vec![small_rational(&mut rng), small_rational(&mut rng)];
        let ls: Vec<Vec<i64>> = (0..g).map(|_| int_vec(&mut rng, 2, 3)).collect();
        let ks: Vec<Vec<i64>> = (0..g).map(|_| int_vec(&mut rng, 3, 3)).collect();
        let Ok(data) = ChainBilinearData::from_vectors(&b, &omega, q("1"), ls, ks) else {
            continue;
        };
        let id = det_a_identity(&b, &data).unwrap();
        for (xi, det) in &id.evaluations {
            assert_eq!(det, &leibniz_det_a(&b, &data, xi));
        }
        assert_eq!(id.imaginary_det, leibniz_det_a(&b, &data, &q("-1")));
        assert!(id.m_max as i128 <= id.m_bound);
        done += 1;
    }
}

#[test]
fn determinant_identity_on_chain_data() {
    let b = RationalLattice::identity(1);
    let p = FrequencyParams::new(vec![q("1")], 0.5, 1.0, q("9/10"), q("0"), q("1/2")).unwrap();
    let out = enumerate_singular_chains(&b, &p, SymbolKind::Nlw, &SiteBox::new(20, 20), 4.0, &SearchLimits::default())
        .unwrap();
    let mut checked = 0;
    for c in &out.chains {
        for q0 in 0..c.chain.sites.len() {
            let picked = independent_selection(&p, &c.chain.sites, q0);
            if picked.is_empty() {
                continue;
            }
            let data = chain_bilinear_data(&b, &p, &c.chain.sites, q0, &picked).unwrap();
            let id = det_a_identity(&b, &data).unwrap();
            assert_eq!(id.residual, 0.0);
            assert!(id.imaginary_det > Rational::zero());
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn zero_time_vector_gives_affine_interval_in_xi() {
    let b = RationalLattice::identity(1);
    let ranges = MeasureRanges {
        p_max: 0,
        m_max: 1,
        orders: Some(vec![2]),
    };
    // g = 2 on d = 1: p is empty and P = −ξ (ω̄m)²; with ω̄ = 1/2 and m = ±1, ζ = 1/4
    let r = measure_tilde_lambda(&b, &[0.5], 0.25, 0.0, &ranges).unwrap();
    // ε = 1/8: ξ < 1/2, i.e. λ ∈ [1/2, √(1/2))
    assert!((r.excluded_measure - (0.5f64.sqrt() - 0.5)).abs() < 1e-15);
}

#[test]
fn measure_matches_grid_sampling() {
    let basis = skew_lattice();
    let ranges = MeasureRanges {
        p_max: 4,
        m_max: 4,
        orders: None,
    };
    let c = toruskit::compound::lattice_separation_constant(&basis).unwrap();
    let gamma = c / 8.0;
    let omega = [0.3, -0.55];
    let r = measure_tilde_lambda(&basis, &omega, gamma, 3.0, &ranges).unwrap();
    let samples = 20_000;
    let hit = (0..samples)
        .filter(|&i| r.excluded.contains(0.5 + (i as f64 + 0.5) / samples as f64))
        .count();
    let tol = 2.0 * r.excluded.parts().len() as f64 / samples as f64;
    assert!((hit as f64 / samples as f64 - r.excluded_measure).abs() <= tol);
    assert!(r.excluded_measure > 0.0);
}

#[test]
fn diophantine_worst_case_is_exhaustive() {
    let w = [0.31, 0.47];
    let r = diophantine_check(&w, 1e-3, 2.0, 8).unwrap();
    let mut best = f64::INFINITY;
    for ell in IndexBox::cube(2, 8).points() {
        let norm = ell[0].abs().max(ell[1].abs());
        if norm == 0 {
            continue;
        }
        let v = (w[0] * ell[0] as f64 + w[1] * ell[1] as f64).abs() * (norm as f64).powi(2) / 2.0;
        best = best.min(v);
    }
    assert_eq!(r.worst_value, best);
    assert_eq!(r.pass, best >= 1e-3);
}

#[test]
fn heavy_mass_rows_pass_bar_lambda() {
    let b = RationalLattice::identity(2);
    // m ≥ 1 + N₀^{−τ}: every ℓ = 0 value is μ_j + m ≥ m
    let p = FrequencyParams::new(vec![q("1/3"), q("1/2")], 0.1, 2.0, q("1"), q("0"), q("5/4")).unwrap();
    let r = bar_lambda_membership(&b, &p, SymbolKind::Nlw, 2, 2.0).unwrap();
    if let Some(w) = &r.witness {
        assert!(w.ell.iter().any(|&v| v != 0));
    }
    assert_eq!(r.checked, 5u64.pow(4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cover_contains_every_sampled_sublevel_point(
        ell in -6i64..=6, j in -4i64..=4, lam in 0.5f64..1.5, m in 0.25f64..4.0, theta0 in -3.0f64..3.0
    ) {
        let b = RationalLattice::identity(1).to_f64();
        let p = FrequencyParams::new(vec![0.7], 0.1, 1.0, lam, 0.0, m).unwrap();
        for kind in [SymbolKind::Nlw, SymbolKind::Nls] {
            for &a in kind.signs() {
                let site = SpaceTimeSite::new(vec![ell], vec![j], a);
                let cover = hypothesis2_cover(&b, &p, kind, &site, 5.0, 1.5).unwrap();
                let eps = 5f64.powf(-1.5);
                for k in 0..400 {
                    let theta = theta0 + k as f64 * 1e-3 - 0.2;
                    let v = symbol(&b, &p.clone().with_theta(theta), &site, kind).unwrap();
                    if v.abs() <= eps * (1.0 - 1e-9) {
                        prop_assert!(cover.iter().any(|iv| iv.contains(theta)), "{theta} {cover:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn excluded_measure_is_monotone_in_gamma(omega in 0.05f64..1.0, tau in 1.0f64..4.0, g1 in 0.0f64..0.25, g2 in 0.0f64..0.25) {
        let b = RationalLattice::identity(1);
        let ranges = MeasureRanges { p_max: 5, m_max: 5, orders: None };
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        let a = measure_tilde_lambda(&b, &[omega], lo, tau, &ranges).unwrap();
        let c = measure_tilde_lambda(&b, &[omega], hi, tau, &ranges).unwrap();
        prop_assert!(a.excluded_measure <= c.excluded_measure + 1e-15);
    }

    #[test]
    fn identity_holds_for_random_skew_data(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = skew_lattice();
        let g = rng.random_range(1..=3);
        let omega = vec![small_rational(&mut rng)];
        let ls: Vec<Vec<i64>> = (0..g).map(|_| int_vec(&mut rng, 1, 4)).collect();
        let ks: Vec<Vec<i64>> = (0..g).map(|_| int_vec(&mut rng, 2, 4)).collect();
        if let Ok(data) = ChainBilinearData::from_vectors(&b, &omega, q("3/2"), ls, ks) {
            let id = det_a_identity(&b, &data).unwrap();
            prop_assert_eq!(id.residual, 0.0);
        }
    }
}
