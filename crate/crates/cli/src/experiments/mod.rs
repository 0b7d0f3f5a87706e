use std::collections::BTreeMap;

use serde_json::Value;
use toruskit::clustering::{build_partition_with, ClusterPartition, DeltaPolicy};
use toruskit::{LatticeBasis, Scalar};

use crate::config::{ExperimentConfig, ExperimentKind, Lattice};
use crate::report::{Check, Series};
use crate::runner::RunError;
use crate::store::Cache;

mod chains;
mod cluster;
mod homological;
mod measure;
mod singular;
mod verify;

/// What an experiment contributes to its report.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub fitted: BTreeMap<String, f64>,
    pub series: BTreeMap<String, Series>,
    pub data: serde_json::Map<String, Value>,
}

impl Outcome {
    fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Non-finite values are left out so the report stays valid JSON.
    fn fit(&mut self, name: impl Into<String>, v: f64) {
        if v.is_finite() {
            self.fitted.insert(name.into(), v);
        }
    }

    fn data(&mut self, name: &str, v: impl serde::Serialize) {
        self.data
            .insert(name.into(), serde_json::to_value(v).expect("report data serializes"));
    }
}

pub(crate) struct Env<'a> {
    pub config: &'a ExperimentConfig,
    pub cache: &'a Cache,
}

impl Env<'_> {
    fn lattice_key(&self) -> Value {
        serde_json::to_value(&self.config.lattice).expect("lattice serializes")
    }

    fn partition<T: Scalar>(
        &self,
        basis: &LatticeBasis<T>,
        radius: i64,
        delta: f64,
        policy: DeltaPolicy,
    ) -> Result<ClusterPartition, RunError> {
        let key = serde_json::json!({
            "lattice": self.lattice_key(),
            "radius": radius,
            "delta": delta,
            "policy": policy,
        });
        Ok(self.cache.get_or_compute(
            "partition",
            &key,
            || build_partition_with(basis, radius, delta, policy),
            ClusterPartition::to_json,
            |v| ClusterPartition::from_json(v).ok(),
        )?)
    }
}

pub(crate) fn run(config: &ExperimentConfig, cache: &Cache) -> Result<Outcome, RunError> {
    let env = Env { config, cache };
    if config.kind == ExperimentKind::Verify {
        return verify::run(&env);
    }
    match config.lattice.build()? {
        Lattice::Exact(b) => run_with(&env, &b),
        Lattice::Floating(b) => run_with(&env, &b),
    }
}

fn run_with<T: Scalar>(env: &Env, basis: &LatticeBasis<T>) -> Result<Outcome, RunError> {
    match env.config.kind {
        ExperimentKind::Cluster => cluster::run(env, basis),
        ExperimentKind::Chains => chains::run(env, basis),
        ExperimentKind::Singular => singular::run(env, basis),
        ExperimentKind::Measure => measure::run(env, basis),
        ExperimentKind::Homological => homological::run(env, basis),
        ExperimentKind::Verify => unreachable!("handled above"),
    }
}
