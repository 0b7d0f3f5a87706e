use serde_json::json;
use toruskit::compound::lattice_separation_constant;
use toruskit::quasi::{measure_tilde_lambda, MeasureRanges};
use toruskit::{LatticeBasis, Scalar};

use super::{Env, Outcome};
use crate::report::{Check, Series};
use crate::runner::RunError;

/// Slope of the least-squares line through the origin.
fn origin_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub(super) fn run<T: Scalar>(env: &Env, basis: &LatticeBasis<T>) -> Result<Outcome, RunError> {
    let cfg = env.config;
    let p = &cfg.measure;
    let omega = cfg.frequency.omega_f64();
    let c = lattice_separation_constant(basis)?;
    let mut gammas = match &p.gammas {
        Some(g) => g.clone(),
        None => {
            let top = c / 4.0;
            let k = p.grid_points - 1;
            (0..=k)
                .map(|i| top * 10f64.powf(-p.grid_decades * (k - i) as f64 / k as f64))
                .collect()
        }
    };
    gammas.sort_by(f64::total_cmp);
    gammas.dedup();

    let mut out = Outcome::default();
    out.fit("separation_constant", c);
    let mut levels = Series::new(&["level", "p_max", "m_max", "slope", "measure_at_max_gamma"]);
    let mut curve = Series::new(&["gamma", "excluded_measure"]);
    let mut slopes = Vec::new();
    let mut not_monotone = Vec::new();
    let mut nonzero_at_zero = Vec::new();
    for level in 0..=p.doublings {
        let ranges = MeasureRanges {
            p_max: p.p_max << level,
            m_max: p.m_max << level,
            orders: p.orders.clone(),
        };
        let zero = measure_tilde_lambda(basis, &omega, 0.0, p.tau, &ranges)?;
        if zero.excluded_measure != 0.0 {
            nonzero_at_zero.push(json!({ "level": level, "measure": zero.excluded_measure }));
        }
        let measures: Vec<f64> = gammas
            .iter()
            .map(|&g| measure_tilde_lambda(basis, &omega, g, p.tau, &ranges).map(|r| r.excluded_measure))
            .collect::<toruskit::Result<_>>()?;
        if let Some(i) = (1..measures.len()).find(|&i| measures[i] < measures[i - 1]) {
            not_monotone.push(json!({ "level": level, "gammas": [gammas[i - 1], gammas[i]], "measures": [measures[i - 1], measures[i]] }));
        }
        let pts: Vec<(f64, f64)> = gammas.iter().copied().zip(measures.iter().copied()).collect();
        let slope = origin_slope(&pts);
        slopes.push(slope);
        levels.push(vec![
            level as f64,
            ranges.p_max as f64,
            ranges.m_max as f64,
            slope.unwrap_or(f64::NAN),
            *measures.last().expect("nonempty grid"),
        ]);
        if level == p.doublings {
            curve.rows = pts.iter().map(|&(g, m)| vec![g, m]).collect();
        }
        if let Some(s) = slope {
            out.fit(format!("slope_level{level}"), s);
        }
    }

    out.check(
        Check::new(
            "monotone",
            "excluded measure is nondecreasing in gamma at every range level",
            not_monotone.is_empty(),
        )
        .with_witness(|| json!(not_monotone)),
    );
    out.check(
        Check::new("zero_at_zero", "excluded measure vanishes at gamma = 0", nonzero_at_zero.is_empty())
            .with_witness(|| json!(nonzero_at_zero)),
    );
    let finite = slopes.iter().all(|s| s.is_some_and(|v| v.is_finite() && v > 0.0));
    out.check(Check::new(
        "slope_finite",
        "least-squares slope of excluded measure in gamma is finite and positive at every range level",
        finite,
    ));
    let base = slopes[0].unwrap_or(f64::NAN);
    let deviation = slopes
        .iter()
        .map(|s| (s.unwrap_or(f64::NAN) / base - 1.0).abs())
        .fold(0.0, f64::max);
    out.check(
        Check::new(
            "slope_stable",
            "the slope changes by at most slope_tolerance (relative) when the (p, m) ranges are doubled",
            finite && deviation <= p.slope_tolerance,
        )
        .with_witness(|| json!({ "slopes": slopes, "max_relative_deviation": deviation })),
    );
    out.fit("slope_max_relative_deviation", deviation);
    out.data("gammas", &gammas);
    out.series.insert("measure".into(), curve);
    out.series.insert("measure_levels".into(), levels);
    Ok(out)
}
