//! Randomised checks of the exact algebraic identities and of the NLW covering bound.

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use toruskit::compound::{cauchy_binet_det, compound_matrix, gram_det_identity};
use toruskit::quasi::{
    cover_count_bound, det_a_identity, hypothesis2_cover, refine_cover, symbol, ChainBilinearData, FrequencyParams,
    SpaceTimeSite, SymbolKind,
};
use toruskit::{Error, Matrix, Rational, RationalLattice};

use super::{Env, Outcome};
use crate::report::Check;
use crate::runner::RunError;

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.random_range(-6..=6i64).into(), rng.random_range(1..=5i64).into())
}

fn int_vec(rng: &mut ChaCha8Rng, len: usize, r: i64) -> Vec<i64> {
    (0..len).map(|_| rng.random_range(-r..=r)).collect()
}

fn random_invertible(rng: &mut ChaCha8Rng, d: usize) -> Matrix<Rational> {
    loop {
        let m = Matrix::from_fn(d, d, |_, _| small_rational(rng));
        if !m.det().expect("square").is_zero() {
            return m;
        }
    }
}

pub(super) fn run(env: &Env) -> Result<Outcome, RunError> {
    let cfg = env.config;
    let p = &cfg.verify;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Outcome::default();

    let mut failures = Vec::new();
    for case in 0..p.cases {
        let d = rng.random_range(2..=p.max_dim);
        let w = random_invertible(&mut rng, d);
        let inv = w.inverse()?;
        for g in 1..=d {
            let prod = compound_matrix(&w, g)?.mul(&compound_matrix(&inv, g)?)?;
            if prod != Matrix::identity(prod.rows()) {
                failures.push(json!({ "case": case, "d": d, "g": g }));
            }
        }
    }
    out.check(
        Check::new(
            "compound_inverse",
            "F_g(W) F_g(W^-1) = I exactly for every order g",
            failures.is_empty(),
        )
        .with_witness(|| json!(failures)),
    );

    let mut failures = Vec::new();
    for case in 0..p.cases {
        let d = rng.random_range(1..=p.max_dim);
        let g = rng.random_range(1..=d);
        let m = Matrix::from_fn(g, d, |_, _| Rational::from_integer(rng.random_range(-5..=5i64).into()));
        let n = Matrix::from_fn(d, g, |_, _| Rational::from_integer(rng.random_range(-5..=5i64).into()));
        if cauchy_binet_det(&m, &n)? != m.mul(&n)?.det()? {
            failures.push(json!({ "case": case, "d": d, "g": g }));
        }
    }
    out.check(
        Check::new(
            "cauchy_binet",
            "sum over g-subsets of det(M^S) det(N_S) equals det(MN)",
            failures.is_empty(),
        )
        .with_witness(|| json!(failures)),
    );

    let mut failures = Vec::new();
    let mut done = 0;
    while done < p.cases {
        let d = rng.random_range(1..=p.max_dim);
        let basis = RationalLattice::new(random_invertible(&mut rng, d))?;
        let g = rng.random_range(1..=d);
        let fs: Vec<Vec<i64>> = (0..g).map(|_| int_vec(&mut rng, d, 4)).collect();
        match gram_det_identity(&basis, &fs) {
            Ok(id) => {
                let gram = Matrix::from_fn(g, g, |a, b| basis.bilinear(&fs[a], &fs[b]).expect("dimensions checked"));
                let direct = gram.det()?;
                if direct != id.det_a || id.p.iter().all(|&v| v == 0) {
                    failures.push(json!({ "case": done, "fs": fs }));
                }
                done += 1;
            }
            Err(Error::DependentVectors) => {}
            Err(e) => {
                failures.push(json!({ "case": done, "fs": fs, "error": e.to_string() }));
                done += 1;
            }
        }
    }
    out.check(
        Check::new(
            "gram_determinant",
            "det<Wf_i, Wf_k> = |F_g(W) p|^2 with p != 0 and det >= |p|^2 / |F_g(W^-1)|^2",
            failures.is_empty(),
        )
        .with_witness(|| json!(failures)),
    );

    let mut failures = Vec::new();
    let mut done = 0;
    while done < p.cases {
        let d = rng.random_range(1..=p.max_dim.min(4));
        let n = rng.random_range(1..=3);
        let g = rng.random_range(1..=d + 1);
        let basis = RationalLattice::new(random_invertible(&mut rng, d))?;
        let omega: Vec<Rational> = (0..n).map(|_| small_rational(&mut rng)).collect();
        let lambda = Rational::new(rng.random_range(2..=6i64).into(), 4.into());
        let ls: Vec<Vec<i64>> = (0..g).map(|_| int_vec(&mut rng, n, 3)).collect();
        let ks: Vec<Vec<i64>> = (0..g).map(|_| int_vec(&mut rng, d, 3)).collect();
        let data = match ChainBilinearData::from_vectors(&basis, &omega, lambda, ls, ks) {
            Ok(data) => data,
            Err(Error::DependentVectors) => continue,
            Err(e) => return Err(e.into()),
        };
        match det_a_identity(&basis, &data) {
            Ok(id) if (id.m_max as i128) <= id.m_bound => {}
            Ok(id) => failures.push(json!({ "case": done, "m_max": id.m_max, "m_bound": id.m_bound.to_string() })),
            Err(e) => failures.push(json!({ "case": done, "error": e.to_string() })),
        }
        done += 1;
    }
    out.check(
        Check::new(
            "det_a_polynomial",
            "det A(lambda) = |F_g(W)p|^2 - lambda^2 |F_(g-1)(W)(omega_bar . m)|^2 and |m| <= g! max|l| max|k|^(g-1)",
            failures.is_empty(),
        )
        .with_witness(|| json!(failures)),
    );

    cover_checks(env, &mut rng, &mut out)?;
    Ok(out)
}

fn cover_checks(env: &Env, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<(), RunError> {
    let cfg = env.config;
    let p = &cfg.verify;
    let basis = cfg.lattice.exact()?.to_f64();
    let omega = cfg.frequency.omega_f64();
    let (n, d) = (omega.len(), basis.dim());
    let eps = p.cover_scale.powf(-p.cover_tau);

    let mut count_failures = Vec::new();
    let mut length_failures = Vec::new();
    let mut uncovered = Vec::new();
    let mut singular_samples: u64 = 0;
    for case in 0..p.cover_cases {
        let site = SpaceTimeSite::wave(int_vec(rng, n, 6), int_vec(rng, d, 6));
        let lambda = rng.random_range(0.5..=1.5);
        let mass = rng.random_range(0.25..=4.0);
        let params = FrequencyParams::new(omega.clone(), cfg.frequency.gamma0, n as f64, lambda, 0.0, mass)?;
        let raw = hypothesis2_cover(&basis, &params, SymbolKind::Nlw, &site, p.cover_scale, p.cover_tau)?;
        let max_len = eps / mass.sqrt();
        let cover = refine_cover(&raw, max_len);
        let case_info = || json!({ "case": case, "ell": site.ell, "j": site.j, "lambda": lambda, "mass": mass });

        if cover.len() > cover_count_bound(mass) {
            let mut w = case_info();
            w["intervals"] = json!(cover.len());
            w["allowed"] = json!(cover_count_bound(mass));
            count_failures.push(w);
        }
        if let Some(iv) = cover.iter().find(|iv| iv.len() > max_len * (1.0 + 1e-12)) {
            let mut w = case_info();
            w["length"] = json!(iv.len());
            w["allowed"] = json!(max_len);
            length_failures.push(w);
        }
        // every θ with |D| ≤ ε must satisfy (c + θ)² ≤ μ_j + m + 1, so this window contains the sublevel set
        let c = lambda * site.ell.iter().zip(&omega).map(|(&l, w)| l as f64 * w).sum::<f64>();
        let radius = (basis.mu(&site.j)? + mass + 1.0).sqrt() + 1.0;
        for k in 0..p.cover_samples {
            let theta = -c - radius + 2.0 * radius * (k as f64 + 0.5) / p.cover_samples as f64;
            let v = symbol(&basis, &params.clone().with_theta(theta), &site, SymbolKind::Nlw)?;
            if v.abs() <= eps {
                singular_samples += 1;
                if !cover.iter().any(|iv| iv.contains(theta)) {
                    let mut w = case_info();
                    w["theta"] = json!(theta);
                    uncovered.push(w);
                }
            }
        }
    }
    let cap = |v: &Vec<serde_json::Value>| json!({ "count": v.len(), "first": v.iter().take(5).collect::<Vec<_>>() });
    out.check(
        Check::new(
            "cover_count",
            "the NLW sublevel set {|D| <= N^-tau1} is covered by at most 2([1/sqrt m] + 1) intervals",
            count_failures.is_empty(),
        )
        .with_witness(|| cap(&count_failures)),
    );
    out.check(
        Check::new(
            "cover_length",
            "each covering interval has length at most N^-tau1 / sqrt m",
            length_failures.is_empty(),
        )
        .with_witness(|| cap(&length_failures)),
    );
    out.check(
        Check::new(
            "cover_sound",
            "every sampled theta with |D| <= N^-tau1 lies in the cover",
            uncovered.is_empty() && singular_samples > 0,
        )
        .with_witness(|| json!({ "singular_samples": singular_samples, "uncovered": cap(&uncovered) })),
    );
    out.data("cover_singular_samples", singular_samples);
    out.data("cover_count_failures", count_failures.len());
    Ok(())
}
