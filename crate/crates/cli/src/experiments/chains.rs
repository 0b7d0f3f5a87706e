use serde_json::json;
use toruskit::clustering::chain_scaling_experiment;
use toruskit::search::SearchLimits;
use toruskit::{LatticeBasis, Scalar};

use super::{Env, Outcome};
use crate::report::{Check, Series};
use crate::runner::RunError;

pub(super) fn run<T: Scalar>(env: &Env, basis: &LatticeBasis<T>) -> Result<Outcome, RunError> {
    let p = &env.config.chains;
    let limits = SearchLimits {
        node_budget: p.node_budget,
        max_length: None,
        memo_cap: p.memo_cap,
    };
    let table = chain_scaling_experiment(basis, &p.gammas, p.radius, &limits)?;
    let mut out = Outcome::default();

    let invalid: Vec<f64> = table.rows.iter().filter(|r| !r.witness_valid).map(|r| r.gamma).collect();
    out.check(
        Check::new(
            "witness_replay",
            "every witness chain has distinct sites and consecutive Gamma-links",
            invalid.is_empty(),
        )
        .with_witness(|| json!({ "gammas": invalid })),
    );
    let truncated: Vec<f64> = table.rows.iter().filter(|r| r.truncated).map(|r| r.gamma).collect();
    out.check(
        Check::new(
            "search_complete",
            "every longest-chain search finished within its budget",
            truncated.is_empty(),
        )
        .with_witness(|| json!({ "gammas": truncated })),
    );
    out.check(Check::new(
        "slope_bound",
        "least-squares slope of ln L* against ln Gamma is at most C1(d) = 2(2d+1)d",
        table.slope.is_some() && table.within_bound,
    ));
    out.check(Check::new(
        "monotone",
        "L*(Gamma) is nondecreasing in Gamma",
        table.monotone,
    ));

    if let Some(s) = table.slope {
        out.fit("slope", s);
    }
    out.fit("exponent_bound", table.exponent_bound as f64);
    out.data("rows", &table.rows);
    let mut series = Series::new(&["gamma", "max_length"]);
    for r in &table.rows {
        series.push(vec![r.gamma, r.max_length as f64]);
    }
    out.series.insert("chain_scaling".into(), series);
    Ok(out)
}
