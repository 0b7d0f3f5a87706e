//! Experiment configuration: a TOML file with one table per experiment kind.
//!
//! Every table is optional and filled with defaults; only the table selected by
//! `kind` drives the run, but all of them are validated. Rationals are written as
//! strings (`"3/4"`, `"-2"`, `"0.125"`) and parsed exactly.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use toruskit::clustering::{delta_threshold, DeltaPolicy};
use toruskit::quasi::{FrequencyParams, SymbolKind};
use toruskit::scalar::{format_rational, parse_rational};
use toruskit::{LatticeBasis, Matrix, Rational, RationalLattice, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    /// Dotted key path of the offending entry, when it can be located.
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)?;
        if let Some(field) = &self.field {
            write!(f, " (`{field}`)")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at {0}")]
    Parse(ParseError),
    #[error("validation error: {0}")]
    Validation(ValidationError),
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation(ValidationError {
        field: field.to_string(),
        message: message.into(),
    })
}

/// An exact rational, written as a string in the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ratio(pub Rational);

impl Ratio {
    pub fn from_i64(v: i64) -> Self {
        Ratio(Rational::from_i64(v))
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Ratio;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string such as \"3/4\", or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Ratio, E> {
                parse_rational(v).map(Ratio).map_err(|e| E::custom(e.to_string()))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Ratio, E> {
                Ok(Ratio::from_i64(v))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Ratio, E> {
                Err(E::custom(format!("float {v} is not exact; quote it as a string")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Cluster,
    Chains,
    Singular,
    Measure,
    Homological,
    Verify,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Cluster => "cluster",
            Self::Chains => "chains",
            Self::Singular => "singular",
            Self::Measure => "measure",
            Self::Homological => "homological",
            Self::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeMode {
    #[default]
    Exact,
    Floating,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    #[serde(default)]
    pub mode: LatticeMode,
    /// Relative tolerance for floating mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    /// Dimension of the identity lattice when no generators are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Generator vectors, i.e. the columns of `V`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<Ratio>>>,
    /// Text file with one generator per line; resolved into `generators` on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators_file: Option<PathBuf>,
}

/// A lattice in the arithmetic selected by the config.
#[derive(Debug, Clone)]
pub enum Lattice {
    Exact(RationalLattice),
    Floating(LatticeBasis<f64>),
}

impl LatticeSpec {
    pub fn dim(&self) -> usize {
        match &self.generators {
            Some(g) => g.len(),
            None => self.dim.unwrap_or(1),
        }
    }

    pub fn exact(&self) -> Result<RationalLattice, ConfigError> {
        let Some(columns) = &self.generators else {
            return Ok(RationalLattice::identity(self.dim()));
        };
        let cols: Vec<Vec<Rational>> = columns.iter().map(|c| c.iter().map(|r| r.0.clone()).collect()).collect();
        let v = Matrix::from_columns(&cols).map_err(|e| invalid("lattice.generators", e.to_string()))?;
        RationalLattice::new(v).map_err(|e| invalid("lattice.generators", e.to_string()))
    }

    pub fn build(&self) -> Result<Lattice, ConfigError> {
        let exact = self.exact()?;
        Ok(match self.mode {
            LatticeMode::Exact => Lattice::Exact(exact),
            LatticeMode::Floating => {
                let v = exact.generators().map(Scalar::to_f64);
                let tol = self.rel_tol.unwrap_or(toruskit::scalar::DEFAULT_REL_TOL);
                Lattice::Floating(
                    LatticeBasis::with_tolerance(v, tol).map_err(|e| invalid("lattice.generators", e.to_string()))?,
                )
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySpec {
    #[serde(default = "FrequencySpec::default_omega")]
    pub omega_bar: Vec<Ratio>,
    #[serde(default = "FrequencySpec::default_gamma0")]
    pub gamma0: f64,
    /// Defaults to `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau0: Option<f64>,
    #[serde(default = "FrequencySpec::default_one")]
    pub lambda: Ratio,
    #[serde(default = "FrequencySpec::default_zero")]
    pub theta: Ratio,
    #[serde(default = "FrequencySpec::default_mass")]
    pub mass: Ratio,
}

impl FrequencySpec {
    fn default_omega() -> Vec<Ratio> {
        vec![Ratio::from_i64(1)]
    }
    fn default_gamma0() -> f64 {
        0.5
    }
    fn default_one() -> Ratio {
        Ratio::from_i64(1)
    }
    fn default_zero() -> Ratio {
        Ratio::from_i64(0)
    }
    fn default_mass() -> Ratio {
        Ratio(Rational::new(1.into(), 2.into()))
    }

    pub fn params<T: Scalar>(&self) -> toruskit::Result<FrequencyParams<T>> {
        let conv = |r: &Ratio| T::from_rational(&r.0);
        FrequencyParams::new(
            self.omega_bar.iter().map(conv).collect(),
            self.gamma0,
            self.tau0.unwrap_or(self.omega_bar.len() as f64),
            conv(&self.lambda),
            conv(&self.theta),
            conv(&self.mass),
        )
    }

    pub fn omega_f64(&self) -> Vec<f64> {
        self.omega_bar.iter().map(|r| r.0.to_f64()).collect()
    }
}

impl Default for FrequencySpec {
    fn default() -> Self {
        Self {
            omega_bar: Self::default_omega(),
            gamma0: Self::default_gamma0(),
            tau0: None,
            lambda: Self::default_one(),
            theta: Self::default_zero(),
            mass: Self::default_mass(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterParams {
    pub radius: i64,
    /// Defaults to half the guaranteed threshold for the lattice dimension.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub policy: DeltaPolicy,
    /// Fit the dyadicity threshold on this smaller box and check the main box against it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_radius: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dyadic_threshold: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diameter_constant: Option<f64>,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            radius: 16,
            delta: None,
            policy: DeltaPolicy::Guaranteed,
            fit_radius: None,
            dyadic_threshold: None,
            diameter_constant: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainsParams {
    pub radius: i64,
    pub gammas: Vec<f64>,
    pub node_budget: u64,
    pub memo_cap: usize,
}

impl Default for ChainsParams {
    fn default() -> Self {
        Self {
            radius: 200,
            gammas: vec![2.0, 4.0, 8.0, 16.0],
            node_budget: 2_000_000,
            memo_cap: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SingularParams {
    pub kinds: Vec<SymbolKind>,
    pub ell_radius: i64,
    pub j_radius: i64,
    pub gammas: Vec<f64>,
    pub node_budget: u64,
    pub memo_cap: usize,
    /// Radius of the `ℓ` box for the Diophantine check of `ω̄`.
    pub diophantine_radius: i64,
}

impl Default for SingularParams {
    fn default() -> Self {
        Self {
            kinds: vec![SymbolKind::Nlw, SymbolKind::Nls],
            ell_radius: 40,
            j_radius: 40,
            gammas: vec![2.0, 4.0],
            node_budget: 2_000_000,
            memo_cap: 1 << 20,
            diophantine_radius: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureParams {
    /// Explicit γ grid; by default `grid_points` log-spaced values over
    /// `grid_decades` decades ending at `c/4`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    pub grid_points: usize,
    pub grid_decades: f64,
    pub tau: f64,
    pub p_max: i64,
    pub m_max: i64,
    /// Number of times both ranges are doubled for the stability check.
    pub doublings: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<usize>>,
    /// Allowed relative change of the fitted slope across range doublings.
    pub slope_tolerance: f64,
}

impl Default for MeasureParams {
    fn default() -> Self {
        Self {
            gammas: None,
            grid_points: 9,
            grid_decades: 2.0,
            tau: 5.0,
            p_max: 2,
            m_max: 2,
            doublings: 2,
            orders: None,
            slope_tolerance: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomologicalParams {
    pub radius: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub policy: DeltaPolicy,
    /// Number of random entries drawn for `Q`.
    pub entries: usize,
    /// Entries couple `j` to `j'` with `|j - j'| ≤ max_offset`.
    pub max_offset: i64,
    /// Entry real and imaginary parts are `a/b` with `|a| ≤ numer_max`, `1 ≤ b ≤ denom_max`.
    pub numer_max: i64,
    pub denom_max: i64,
}

impl Default for HomologicalParams {
    fn default() -> Self {
        Self {
            radius: 32,
            delta: None,
            policy: DeltaPolicy::Guaranteed,
            entries: 2000,
            max_offset: 4,
            numer_max: 9,
            denom_max: 9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyParams {
    /// Random cases per algebraic identity.
    pub cases: usize,
    pub max_dim: usize,
    pub cover_cases: usize,
    pub cover_samples: usize,
    pub cover_scale: f64,
    pub cover_tau: f64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            cases: 50,
            max_dim: 4,
            cover_cases: 100,
            cover_samples: 1000,
            cover_scale: 8.0,
            cover_tau: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Series to write as CSV; all of them when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<String>>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            series: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub frequency: FrequencySpec,
    #[serde(default)]
    pub cluster: ClusterParams,
    #[serde(default)]
    pub chains: ChainsParams,
    #[serde(default)]
    pub singular: SingularParams,
    #[serde(default)]
    pub measure: MeasureParams,
    #[serde(default)]
    pub homological: HomologicalParams,
    #[serde(default)]
    pub verify: VerifyParams,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    /// Default config for `kind`, with every default filled.
    pub fn new(kind: ExperimentKind) -> Self {
        let mut c = Self {
            kind,
            seed: 0,
            lattice: LatticeSpec::default(),
            frequency: FrequencySpec::default(),
            cluster: ClusterParams::default(),
            chains: ChainsParams::default(),
            singular: SingularParams::default(),
            measure: MeasureParams::default(),
            homological: HomologicalParams::default(),
            verify: VerifyParams::default(),
            output: OutputSpec::default(),
        };
        c.fill_defaults();
        c
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn fill_defaults(&mut self) {
        let d = self.lattice.dim();
        self.lattice.dim.get_or_insert(d);
        let half = delta_threshold(d) / 2.0;
        self.cluster.delta.get_or_insert(half);
        self.homological.delta.get_or_insert(half);
        let n = self.frequency.omega_bar.len() as f64;
        self.frequency.tau0.get_or_insert(n);
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let lat = &self.lattice;
        if let Some(cols) = &lat.generators {
            if cols.is_empty() || cols.iter().any(|c| c.len() != cols.len()) {
                return Err(invalid("lattice.generators", "need d generators of length d"));
            }
            if lat.dim.is_some_and(|d| d != cols.len()) {
                return Err(invalid("lattice.dim", "disagrees with the number of generators"));
            }
        }
        let d = lat.dim();
        if !(1..=8).contains(&d) {
            return Err(invalid("lattice.dim", format!("{d} outside 1..=8")));
        }
        if let Some(t) = lat.rel_tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(invalid("lattice.rel_tol", "must lie in (0, 1)"));
            }
        }
        lat.build()?;
        self.frequency
            .params::<Rational>()
            .map_err(|e| invalid("frequency", e.to_string()))?;

        check_delta("cluster.delta", self.cluster.delta, self.cluster.policy, d)?;
        check_delta("homological.delta", self.homological.delta, self.homological.policy, d)?;
        let c = &self.cluster;
        positive_radius("cluster.radius", c.radius, 4096)?;
        if let Some(r) = c.fit_radius {
            if r < 1 || r > c.radius {
                return Err(invalid("cluster.fit_radius", format!("must lie in 1..={}", c.radius)));
            }
        }
        if c.dyadic_threshold.is_some_and(|t| t < 0) {
            return Err(invalid("cluster.dyadic_threshold", "must be nonnegative"));
        }
        if c.diameter_constant.is_some_and(|v| !(v >= 0.0 && v.is_finite())) {
            return Err(invalid("cluster.diameter_constant", "must be finite and nonnegative"));
        }

        positive_radius("chains.radius", self.chains.radius, 100_000)?;
        link_radii("chains.gammas", &self.chains.gammas)?;
        positive("chains.node_budget", self.chains.node_budget as f64)?;
        positive("chains.memo_cap", self.chains.memo_cap as f64)?;

        let s = &self.singular;
        if s.kinds.is_empty() {
            return Err(invalid("singular.kinds", "need at least one symbol"));
        }
        positive_radius("singular.ell_radius", s.ell_radius, 10_000)?;
        positive_radius("singular.j_radius", s.j_radius, 10_000)?;
        link_radii("singular.gammas", &s.gammas)?;
        positive("singular.node_budget", s.node_budget as f64)?;
        positive("singular.memo_cap", s.memo_cap as f64)?;
        positive_radius("singular.diophantine_radius", s.diophantine_radius, 10_000)?;

        let m = &self.measure;
        if let Some(g) = &m.gammas {
            if g.is_empty() || g.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(invalid("measure.gammas", "need a nonempty list of finite gamma >= 0"));
            }
        }
        if m.grid_points < 2 {
            return Err(invalid("measure.grid_points", "need at least 2"));
        }
        positive("measure.grid_decades", m.grid_decades)?;
        if !(m.tau.is_finite() && m.tau >= 0.0) {
            return Err(invalid("measure.tau", "must be finite and nonnegative"));
        }
        if m.p_max < 0 || m.m_max < 1 {
            return Err(invalid("measure.m_max", "need p_max >= 0 and m_max >= 1"));
        }
        if m.doublings > 4 {
            return Err(invalid("measure.doublings", "at most 4"));
        }
        if let Some(o) = &m.orders {
            if o.is_empty() || o.iter().any(|&g| g == 0 || g > d + 1) {
                return Err(invalid("measure.orders", format!("orders must lie in 1..={}", d + 1)));
            }
        }
        positive("measure.slope_tolerance", m.slope_tolerance)?;

        let h = &self.homological;
        positive_radius("homological.radius", h.radius, 256)?;
        if h.max_offset < 0 {
            return Err(invalid("homological.max_offset", "must be nonnegative"));
        }
        if h.numer_max < 1 || h.denom_max < 1 {
            return Err(invalid("homological.numer_max", "entry bounds must be >= 1"));
        }

        let v = &self.verify;
        if !(2..=6).contains(&v.max_dim) {
            return Err(invalid("verify.max_dim", "must lie in 2..=6"));
        }
        if v.cover_scale <= 1.0 || !v.cover_scale.is_finite() {
            return Err(invalid("verify.cover_scale", "must exceed 1"));
        }
        positive("verify.cover_tau", v.cover_tau)?;

        if let Some(series) = &self.output.series {
            if let Some(bad) = series.iter().find(|s| s.is_empty() || s.contains(['/', '\\'])) {
                return Err(invalid("output.series", format!("bad series name {bad:?}")));
            }
        }
        Ok(())
    }
}

fn check_delta(field: &str, delta: Option<f64>, policy: DeltaPolicy, d: usize) -> Result<(), ConfigError> {
    let delta = delta.expect("filled on load");
    let max = match policy {
        DeltaPolicy::Guaranteed => delta_threshold(d),
        DeltaPolicy::Exploratory => 1.0,
    };
    if !(delta > 0.0) {
        return Err(invalid(field, format!("{delta} must be positive")));
    }
    if delta >= max {
        return Err(invalid(
            field,
            match policy {
                DeltaPolicy::Guaranteed => format!(
                    "{delta} exceeds the guaranteed threshold {max} for d = {d} (set policy = \"exploratory\" to allow up to 1)"
                ),
                DeltaPolicy::Exploratory => format!("{delta} must be below 1"),
            },
        ));
    }
    Ok(())
}

fn positive_radius(field: &str, r: i64, max: i64) -> Result<(), ConfigError> {
    if r < 1 || r > max {
        return Err(invalid(field, format!("{r} outside 1..={max}")));
    }
    Ok(())
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(field, format!("{v} must be positive")));
    }
    Ok(())
}

fn link_radii(field: &str, gammas: &[f64]) -> Result<(), ConfigError> {
    if gammas.is_empty() {
        return Err(invalid(field, "need at least one link radius"));
    }
    if let Some(g) = gammas.iter().find(|g| !(g.is_finite() && **g >= 2.0)) {
        return Err(invalid(field, format!("link radius {g} below 2")));
    }
    Ok(())
}

/// Dotted key for the entry at byte `offset`: the nearest table header above plus the key on that line.
fn locate_field(text: &str, offset: usize) -> Option<String> {
    let upto = &text[..offset.min(text.len())];
    let line_start = upto.rfind('\n').map_or(0, |i| i + 1);
    let line_end = text[line_start..].find('\n').map_or(text.len(), |i| line_start + i);
    let line = &text[line_start..line_end];
    let key = line.split_once('=').map(|(k, _)| k.trim().trim_matches('"').to_string());
    let table = upto[..line_start].lines().rev().find_map(|l| {
        let l = l.trim();
        (l.starts_with('[') && l.ends_with(']')).then(|| l.trim_matches(['[', ']']).trim().to_string())
    });
    match (table, key) {
        (Some(t), Some(k)) => Some(format!("{t}.{k}")),
        (None, Some(k)) => Some(k),
        (Some(t), None) => Some(t),
        (None, None) => None,
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let upto = &text[..offset.min(text.len())];
    let line = upto.matches('\n').count() + 1;
    let col = upto.len() - upto.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

fn parse_generators_file(path: &Path) -> Result<Vec<Vec<Ratio>>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                parse_rational(tok).map(Ratio).map_err(|e| {
                    ConfigError::Parse(ParseError {
                        line: i + 1,
                        column: 1,
                        field: Some("lattice.generators_file".into()),
                        message: format!("{}: {e}", path.display()),
                    })
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(row);
    }
    Ok(out)
}

/// Parses and validates config text; `base` resolves relative file references.
pub fn parse_config(text: &str, base: &Path) -> Result<ExperimentConfig, ConfigError> {
    let mut config: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let offset = e.span().map_or(0, |s| s.start);
        let (line, column) = line_col(text, offset);
        ConfigError::Parse(ParseError {
            line,
            column,
            field: e.span().and_then(|s| locate_field(text, s.start)),
            message: e.message().to_string(),
        })
    })?;
    if let Some(file) = config.lattice.generators_file.take() {
        if config.lattice.generators.is_some() {
            return Err(invalid("lattice.generators_file", "give either generators or generators_file"));
        }
        config.lattice.generators = Some(parse_generators_file(&base.join(file))?);
    }
    config.fill_defaults();
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}
