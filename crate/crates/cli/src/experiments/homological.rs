use num::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use toruskit::boxes::IndexBox;
use toruskit::delort::{
    build_d_operator, check_homological, dn_split, s_decay_norm, solve_homological, verify_r_support,
    x_bound_violations, BlockMatrix,
};
use toruskit::{LatticeBasis, Rational, Scalar};

use super::{Env, Outcome};
use crate::report::Check;
use crate::runner::RunError;

fn small_rational<T: Scalar>(rng: &mut ChaCha8Rng, numer: i64, denom: i64) -> T {
    let a = rng.random_range(-numer..=numer);
    let b = rng.random_range(1..=denom);
    T::from_rational(&Rational::new(a.into(), b.into()))
}

fn vanishes<T: Scalar>(m: &BlockMatrix<T>, scale: f64, tol: f64) -> bool {
    if T::EXACT {
        m.is_zero()
    } else {
        m.max_abs() <= tol * scale.max(1.0)
    }
}

pub(super) fn run<T: Scalar>(env: &Env, basis: &LatticeBasis<T>) -> Result<Outcome, RunError> {
    let cfg = env.config;
    let p = &cfg.homological;
    let delta = p.delta.expect("filled on load");
    let d = basis.dim();
    let partition = env.partition(basis, p.radius, delta, p.policy)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = IndexBox::cube(d, p.radius);
    let mut q = BlockMatrix::<T>::new(d, p.radius);
    for _ in 0..p.entries {
        let j = grid.point(rng.random_range(0..grid.len()));
        let j2: Vec<i64> = j.iter().map(|&c| c + rng.random_range(-p.max_offset..=p.max_offset)).collect();
        let re = small_rational(&mut rng, p.numer_max, p.denom_max);
        let im = small_rational(&mut rng, p.numer_max, p.denom_max);
        if grid.contains(&j2) {
            q.set(&j, &j2, Complex::new(re, im))?;
        }
    }

    let (q_d, q_nd) = dn_split(&q, &partition)?;
    let d_op = build_d_operator::<T>(&partition);
    let tol = basis.rel_tol();
    let scale = q.max_abs() * d_op.max_abs();
    let split_residual = q_d.add(&q_nd)?.sub(&q)?;
    let commutator = q_d.commutator(&d_op)?;
    let nd_commutator = q_nd.commutator(&d_op)?;

    let solution = solve_homological(basis, &q_nd, &partition, delta)?;
    let check = check_homological(basis, &q_nd, &solution);
    let support = verify_r_support(&solution, &partition, delta)?;
    let x_flags = x_bound_violations(&q_nd, &solution);

    let mut out = Outcome::default();
    out.check(Check::new(
        "split_sum",
        "Q_D + Q_ND = Q entrywise",
        vanishes(&split_residual, q.max_abs(), tol),
    ));
    out.check(
        Check::new(
            "diagonal_commutes",
            "[Q_D, D] = 0 for the cluster-diagonal operator D = diag(M_alpha^2)",
            vanishes(&commutator, scale, tol),
        )
        .with_witness(|| json!({ "max_abs": commutator.max_abs() })),
    );
    out.check(
        Check::new(
            "homological_identity",
            "(mu_j' - mu_j) X - W - R = 0 on every entry, with X and R supported on disjoint parts of W",
            check.exact && check.supports_disjoint && check.supports_cover,
        )
        .with_witness(|| json!(check)),
    );
    out.check(
        Check::new(
            "remainder_support",
            "every entry of R has |j - j'| >= (|j| + |j'|)^delta / 2",
            support.violations.is_empty(),
        )
        .with_witness(|| json!(support.violations.iter().take(10).collect::<Vec<_>>())),
    );

    out.fit("max_residual", check.max_residual);
    out.fit("w_decay_norm_s1", s_decay_norm(&q_nd, 1.0));
    out.fit("x_decay_norm_s1", s_decay_norm(&solution.x, 1.0));
    out.fit("r_decay_norm_s1", s_decay_norm(&solution.r, 1.0));
    out.data("q_entries", q.nnz());
    out.data("q_d_entries", q_d.nnz());
    out.data("q_nd_entries", q_nd.nnz());
    out.data("x_entries", solution.x.nnz());
    out.data("r_entries", solution.r.nnz());
    out.data("nd_commutator_max_abs", nd_commutator.max_abs());
    out.data("x_bound_flags", x_flags.len());
    out.data("clusters", partition.clusters().len());
    Ok(out)
}
