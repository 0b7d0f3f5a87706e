use serde_json::json;
use toruskit::clustering::{verify_cluster_properties, ConstantOverrides};
use toruskit::{LatticeBasis, Scalar};

use super::{Env, Outcome};
use crate::report::{Check, Series};
use crate::runner::RunError;

pub(super) fn run<T: Scalar>(env: &Env, basis: &LatticeBasis<T>) -> Result<Outcome, RunError> {
    let p = &env.config.cluster;
    let delta = p.delta.expect("filled on load");
    let mut out = Outcome::default();
    let mut overrides = ConstantOverrides {
        dyadic_threshold: p.dyadic_threshold,
        diameter_constant: p.diameter_constant,
    };
    if let (None, Some(r)) = (overrides.dyadic_threshold, p.fit_radius) {
        let small = env.partition(basis, r, delta, p.policy)?;
        let fit = verify_cluster_properties(basis, &small, &ConstantOverrides::default())?;
        overrides.dyadic_threshold = Some(fit.fitted_dyadic_threshold);
        out.fit("fit_box_dyadic_threshold", fit.fitted_dyadic_threshold as f64);
    }

    let partition = env.partition(basis, p.radius, delta, p.policy)?;
    let rep = verify_cluster_properties(basis, &partition, &overrides)?;

    out.check(
        Check::new(
            "separation",
            "|j1-j2| + |mu1-mu2| >= (|j1|+|j2|)^delta for j1, j2 in distinct non-boundary clusters",
            rep.separation_violations.is_empty(),
        )
        .with_witness(|| json!(rep.separation_violations.iter().take(10).collect::<Vec<_>>())),
    );
    out.check(
        Check::new(
            "partition_closed",
            "no pair in distinct clusters satisfies the one-step clustering relation",
            rep.link_violations.is_empty(),
        )
        .with_witness(|| json!(rep.link_violations.iter().take(10).collect::<Vec<_>>())),
    );
    out.check(
        Check::new(
            "dyadicity",
            "M_alpha <= 2 m_alpha for every non-boundary cluster with M_alpha above the threshold",
            rep.dyadicity_violations.is_empty(),
        )
        .with_witness(|| json!(rep.dyadicity_violations)),
    );
    if p.diameter_constant.is_some() {
        out.check(
            Check::new(
                "diameter",
                "|j1-j2| + |mu1-mu2| <= C (|j1|+|j2|)^((C1(d)+1) delta) inside every non-boundary cluster",
                rep.diameter_violations.is_empty(),
            )
            .with_witness(|| json!(rep.diameter_violations.iter().take(10).collect::<Vec<_>>())),
        );
    }

    out.fit("dyadic_threshold", rep.dyadic_threshold_used as f64);
    out.fit("fitted_dyadic_threshold", rep.fitted_dyadic_threshold as f64);
    out.fit("diameter_constant", rep.fitted_diameter_constant);
    out.fit("diameter_reference_exponent", rep.reference_exponent);
    if let Some(e) = rep.fitted_diameter_exponent {
        out.fit("diameter_exponent", e);
    }
    out.data("clusters", partition.clusters().len());
    out.data("interior_clusters", rep.interior_clusters);
    out.data("boundary_clusters", rep.boundary_clusters);
    out.data("boundary_margin", partition.margin());
    out.data("pairs_checked", rep.pairs_checked);
    out.data("largest_cluster", partition.clusters().iter().map(|c| c.members.len()).max());

    let mut series = Series::new(&["M_alpha", "diameter"]);
    for &(m, d) in &rep.diameter_series {
        series.push(vec![m as f64, d as f64]);
    }
    out.series.insert("cluster_diameter".into(), series);
    Ok(out)
}
