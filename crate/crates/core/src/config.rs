//! Run configuration, read from TOML.
//!
//! ```toml
//! command = "eig-pucci"        # optional; must match the CLI command if given
//! seed = 0
//!
//! [domain]
//! kind = "interval"            # interval | ball | half-line | line
//! a = 0
//! b = "pi"                     # reals may be written as "pi", "pi/2", "3*pi/4"
//!
//! [bounds]
//! theta = 2.0                  # number, { knots = [...], values = [...] },
//! Theta = 8.0                  # or { profile = "affine" | "cosine", ... }
//!
//! [grid]
//! n = 2000
//! ```
//!
//! Command sections (`[covariance]`, `[minmax]`, `[select]`, `[exhaust]`,
//! `[simulate]`, `[saddle]`, `[solver]`, `[expect]`) are documented on their
//! types. Unknown keys are rejected with the path to the key.

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, Grid, Region, ShrinkRule};
use crate::eigen::SolverConfig;
use crate::error::{Error, Result};
use crate::fields::{BoundFields, CovarianceField, Profile, SamplerSpec, ScalarField};
use crate::robust::GridPolicy;

/// A real number, written as a TOML number or a short expression in `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Real(pub f64);

impl Real {
    pub fn get(self) -> f64 {
        self.0
    }
}

fn parse_factor(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(prefix) = s.strip_suffix("pi") {
        let prefix = prefix.trim().trim_end_matches('*').trim();
        let k = match prefix {
            "" | "+" => 1.0,
            "-" => -1.0,
            p => p.parse::<f64>().ok()?,
        };
        Some(k * PI)
    } else {
        s.parse::<f64>().ok()
    }
}

/// Parses `x`, `pi`, `k*pi`, `kpi`, `pi/k`, `k*pi/m`.
pub fn parse_real(text: &str) -> Option<f64> {
    let mut parts = text.split('/');
    let num = parse_factor(parts.next()?)?;
    let value = match parts.next() {
        None => num,
        Some(den) => num / den.trim().parse::<f64>().ok()?,
    };
    if parts.next().is_some() || !value.is_finite() {
        return None;
    }
    Some(value)
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or an expression such as \"pi/2\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Real, E> {
                parse_real(v)
                    .map(Real)
                    .ok_or_else(|| E::custom(format!("cannot read {v:?} as a real number")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    EigLinear,
    EigPucci,
    Minmax,
    Exhaust,
    Select,
    Simulate,
    Saddle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::EigLinear => "eig-linear",
            Command::EigPucci => "eig-pucci",
            Command::Minmax => "minmax",
            Command::Exhaust => "exhaust",
            Command::Select => "select",
            Command::Simulate => "simulate",
            Command::Saddle => "saddle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    Interval {
        a: Real,
        b: Real,
    },
    Ball {
        dim: usize,
        #[serde(default)]
        center: Option<Vec<Real>>,
        #[serde(default = "unit")]
        radius: Real,
    },
    HalfLine {
        a: Real,
    },
    Line,
}

fn unit() -> Real {
    Real(1.0)
}

impl DomainSpec {
    pub fn region(&self) -> Result<Region> {
        Ok(match self {
            DomainSpec::HalfLine { a } => Region::HalfLine { a: a.get() },
            DomainSpec::Line => Region::Line,
            _ => Region::from(self.bounded()?),
        })
    }

    pub fn bounded(&self) -> Result<Domain> {
        match self {
            DomainSpec::Interval { a, b } => Domain::interval(a.get(), b.get()),
            DomainSpec::Ball { dim, center, radius } => {
                let c = center
                    .as_ref()
                    .map(|c| c.iter().map(|r| r.get()).collect())
                    .unwrap_or_else(|| vec![0.0; *dim]);
                Domain::ball(*dim, c, radius.get())
            }
            _ => Err(Error::config(
                "domain.kind",
                "this command needs a bounded domain (interval or ball)",
            )),
        }
    }
}

/// A scalar field: a number, a table, or a named profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Constant(Real),
    Table(FieldTable),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldTable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<Real>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Real>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intercept: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavenumber: Option<Real>,
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = FieldSpec;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, a real expression, or a field table")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<FieldSpec, E> {
                Ok(FieldSpec::Constant(Real(v)))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<FieldSpec, E> {
                Ok(FieldSpec::Constant(Real(v as f64)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<FieldSpec, E> {
                Ok(FieldSpec::Constant(Real(v as f64)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<FieldSpec, E> {
                parse_real(v)
                    .map(|x| FieldSpec::Constant(Real(x)))
                    .ok_or_else(|| E::custom(format!("cannot read {v:?} as a real number")))
            }
            fn visit_map<A: MapAccess<'de>>(self, map: A) -> std::result::Result<FieldSpec, A::Error> {
                FieldTable::deserialize(de::value::MapAccessDeserializer::new(map)).map(FieldSpec::Table)
            }
        }
        d.deserialize_any(V)
    }
}

impl FieldSpec {
    pub fn build(&self, path: &str) -> Result<ScalarField> {
        let table = match self {
            FieldSpec::Constant(r) => return Ok(ScalarField::Constant(r.get())),
            FieldSpec::Table(t) => t,
        };
        let need = |v: Option<Real>, key: &str| -> Result<f64> {
            v.map(Real::get)
                .ok_or_else(|| Error::config(format!("{path}.{key}"), "missing required key"))
        };
        match (table.profile.as_deref(), &table.knots, &table.values) {
            (None, Some(k), Some(v)) => {
                ScalarField::tabulated(k.iter().map(|r| r.get()).collect(), v.iter().map(|r| r.get()).collect())
                    .map_err(|e| Error::config(path, e.to_string()))
            }
            (Some("affine"), None, None) => Ok(ScalarField::Profile(Profile::Affine {
                intercept: need(table.intercept, "intercept")?,
                slope: need(table.slope, "slope")?,
            })),
            (Some("cosine"), None, None) => Ok(ScalarField::Profile(Profile::Cosine {
                mean: need(table.mean, "mean")?,
                amplitude: need(table.amplitude, "amplitude")?,
                wavenumber: need(table.wavenumber, "wavenumber")?,
            })),
            (Some(p), _, _) if p != "affine" && p != "cosine" => Err(Error::config(
                format!("{path}.profile"),
                format!("unknown profile {p:?} (expected \"affine\" or \"cosine\")"),
            )),
            _ => Err(Error::config(
                path,
                "give either knots and values, or a profile with its parameters",
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    pub theta: FieldSpec,
    #[serde(rename = "Theta")]
    pub upper_theta: FieldSpec,
}

/// `[covariance]` for `eig-linear`: either `c` (isotropic) or `radial` and
/// `tangential` (balls only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tangential: Option<FieldSpec>,
}

impl CovarianceSpec {
    pub fn build(&self, grid: &Grid) -> Result<CovarianceField> {
        match (&self.c, &self.radial, &self.tangential) {
            (Some(c), None, None) => Ok(CovarianceField::Scalar(c.build("covariance.c")?.sample(grid))),
            (None, Some(r), Some(t)) => {
                if !grid.is_ball() {
                    return Err(Error::config(
                        "covariance.radial",
                        "radial/tangential coefficients need a ball",
                    ));
                }
                Ok(CovarianceField::Radial {
                    radial: r.build("covariance.radial")?.sample(grid),
                    tangential: t.build("covariance.tangential")?.sample(grid),
                })
            }
            _ => Err(Error::config(
                "covariance",
                "give either c, or both radial and tangential",
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_nodes")]
    pub n: usize,
}

fn default_nodes() -> usize {
    2000
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n: default_nodes() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub tol: f64,
    pub residual_tol: f64,
    pub max_policy_iterations: usize,
    pub max_iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Real>,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            tol: d.tol,
            residual_tol: d.residual_tol,
            max_policy_iterations: d.max_policy_iterations,
            max_iterations: d.max_iterations,
            x0: None,
        }
    }
}

impl SolverSpec {
    pub fn build(&self) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            residual_tol: self.residual_tol,
            max_policy_iterations: self.max_policy_iterations,
            max_iterations: self.max_iterations,
            x0: self.x0.map(Real::get),
        }
    }
}

/// `[expect]`: optional reference values that become verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Real>,
    /// Relative tolerance on `lambda`.
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    /// `"theta"` or `"Theta"`: every node's policy must use that envelope value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
}

fn default_rel_tol() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinMaxSection {
    pub n_samples: usize,
    pub m: Vec<usize>,
    pub sampler: SamplerSpec,
    pub monotone_slack: f64,
}

impl Default for MinMaxSection {
    fn default() -> Self {
        Self {
            n_samples: 100,
            m: vec![5, 10, 20, 40],
            sampler: SamplerSpec::Mixed,
            monotone_slack: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectSection {
    pub m: Vec<usize>,
}

impl Default for SelectSection {
    fn default() -> Self {
        Self { m: vec![5, 10, 20, 40] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExhaustSection {
    pub n_max: usize,
    #[serde(default = "default_offset")]
    pub offset: f64,
    /// Interior nodes per member; ignored if `spacing` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_limit: Option<Real>,
    /// Required `λ*(E_{n_max}) - known_limit` ceiling, as a verdict.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_tol: Option<f64>,
}

fn default_offset() -> f64 {
    ShrinkRule::default().offset
}

impl ExhaustSection {
    pub fn policy(&self, grid: &GridSpec) -> GridPolicy {
        match (self.spacing, self.nodes) {
            (Some(h), _) => GridPolicy::Spacing(h.get()),
            (None, Some(n)) => GridPolicy::Nodes(n),
            (None, None) => GridPolicy::Nodes(grid.n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioName {
    #[serde(rename = "theta")]
    Lower,
    #[serde(rename = "Theta")]
    Upper,
    #[serde(rename = "sampled")]
    Sampled,
}

/// `[simulate]`: paths under one scenario, `π*` against its pathwise bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: usize,
    #[serde(default = "default_guard")]
    pub guard: f64,
    #[serde(default = "one")]
    pub substeps: usize,
    #[serde(default = "half")]
    pub window_start: f64,
    #[serde(default = "lower_scenario")]
    pub scenario: ScenarioName,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default = "default_keep")]
    pub keep_paths: usize,
    #[serde(default = "default_every")]
    pub csv_every: usize,
    /// Verdict: `min V/(e^{λt}η) ≥ 1 - ratio_tol`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_tol: Option<f64>,
    /// Verdict: halving `dt` shrinks the worst scaled defect by at least this factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halving_factor: Option<f64>,
    /// Verdict: mean `π*` growth within `growth_tol` of this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_growth: Option<Real>,
    #[serde(default = "default_growth_tol")]
    pub growth_tol: f64,
}

fn default_dt() -> f64 {
    1e-3
}
fn default_guard() -> f64 {
    1e-3
}
fn one() -> usize {
    1
}
fn half() -> f64 {
    0.5
}
fn lower_scenario() -> ScenarioName {
    ScenarioName::Lower
}
fn default_keep() -> usize {
    5
}
fn default_every() -> usize {
    100
}
fn default_growth_tol() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaddleSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: usize,
    #[serde(default = "default_guard")]
    pub guard: f64,
    #[serde(default = "one")]
    pub substeps: usize,
    #[serde(default = "half")]
    pub window_start: f64,
    /// Weights `κ` of the constant-proportion alternatives.
    #[serde(default = "default_proportions")]
    pub proportions: Vec<f64>,
    #[serde(default = "three")]
    pub n_sampled: usize,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default = "default_growth_tol")]
    pub tolerance: f64,
}

fn default_proportions() -> Vec<f64> {
    vec![0.5, 1.0]
}
fn three() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: u64,
    pub domain: DomainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariance: Option<CovarianceSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<ExpectSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minmax: Option<MinMaxSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub select: Option<SelectSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaust: Option<ExhaustSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saddle: Option<SaddleSection>,
}

/// Parses and validates a TOML run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = toml::Deserializer::parse(text).map_err(|e| Error::config("<document>", e.to_string()))?;
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(
            if path.is_empty() || path == "." {
                "<root>".into()
            } else {
                path
            },
            e.into_inner().to_string(),
        )
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    /// Cross-field checks that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        let region = self.domain.region().map_err(|e| relabel(e, "domain"))?;
        if let Some(b) = &self.bounds {
            self.bounds_on(b, region)?;
        }
        if self.grid.n < crate::domain::MIN_GRID_NODES {
            return Err(Error::config(
                "grid.n",
                format!("need at least {} interior nodes", crate::domain::MIN_GRID_NODES),
            ));
        }
        let s = &self.solver;
        if !(s.tol > 0.0 && s.residual_tol > 0.0) {
            return Err(Error::config("solver.tol", "tolerances must be positive"));
        }
        if s.max_iterations == 0 || s.max_policy_iterations == 0 {
            return Err(Error::config(
                "solver.max_iterations",
                "iteration caps must be positive",
            ));
        }
        if let Some(e) = &self.expect {
            if let Some(p) = &e.policy {
                if p != "theta" && p != "Theta" {
                    return Err(Error::config("expect.policy", "expected \"theta\" or \"Theta\""));
                }
            }
        }
        if let Some(m) = &self.minmax {
            if m.m.contains(&0) {
                return Err(Error::config("minmax.m", "selection indices must be >= 1"));
            }
        }
        if let Some(m) = &self.select {
            if m.m.is_empty() || m.m.contains(&0) {
                return Err(Error::config("select.m", "give at least one index m >= 1"));
            }
        }
        if let Some(x) = &self.exhaust {
            if x.n_max == 0 {
                return Err(Error::config("exhaust.n_max", "must be at least 1"));
            }
        }
        if let Some(sim) = &self.simulate {
            check_paths(
                "simulate",
                sim.n_paths,
                sim.dt,
                sim.horizon,
                sim.substeps,
                sim.window_start,
            )?;
        }
        if let Some(sd) = &self.saddle {
            check_paths("saddle", sd.n_paths, sd.dt, sd.horizon, sd.substeps, sd.window_start)?;
        }
        Ok(())
    }

    fn bounds_on(&self, b: &BoundsSpec, region: Region) -> Result<BoundFields> {
        let lower = b.theta.build("bounds.theta")?;
        let upper = b.upper_theta.build("bounds.Theta")?;
        BoundFields::new(lower, upper, region).map_err(|e| relabel(e, "bounds"))
    }

    pub fn bounds(&self) -> Result<BoundFields> {
        let b = self
            .bounds
            .as_ref()
            .ok_or_else(|| Error::config("bounds", "this command needs [bounds] with theta and Theta"))?;
        self.bounds_on(b, self.domain.region()?)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.domain.bounded()?, self.grid.n).map_err(|e| relabel(e, "grid.n"))
    }
}

fn check_paths(section: &str, n_paths: usize, dt: f64, horizon: f64, substeps: usize, window: f64) -> Result<()> {
    if n_paths == 0 {
        return Err(Error::config(format!("{section}.n_paths"), "must be at least 1"));
    }
    if !(dt > 0.0) {
        return Err(Error::config(format!("{section}.dt"), "must be positive"));
    }
    if !(horizon > dt) {
        return Err(Error::config(format!("{section}.horizon"), "must exceed dt"));
    }
    if substeps == 0 {
        return Err(Error::config(format!("{section}.substeps"), "must be at least 1"));
    }
    if !(0.0..1.0).contains(&window) {
        return Err(Error::config(format!("{section}.window_start"), "must lie in [0, 1)"));
    }
    Ok(())
}

fn relabel(e: Error, path: &str) -> Error {
    match e {
        Error::Config { .. } => e,
        other => Error::config(path, other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
command = "eig-pucci"
[domain]
kind = "interval"
a = 0
b = "pi"
[bounds]
theta = 2.0
Theta = 8.0
[grid]
n = 2000
"#;

    #[test]
    fn minimal_config_parses() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.command, Some(Command::EigPucci));
        assert_eq!(c.grid.n, 2000);
        assert_eq!(
            c.domain,
            DomainSpec::Interval {
                a: Real(0.0),
                b: Real(PI)
            }
        );
        c.bounds().unwrap();
    }

    #[test]
    fn reversed_envelope_is_config_error() {
        let text = MINIMAL
            .replace("theta = 2.0", "theta = 8.0")
            .replace("Theta = 8.0", "Theta = 2.0");
        let err = parse_config(&text).unwrap_err();
        match err {
            Error::Config { path, message } => {
                assert_eq!(path, "bounds");
                assert!(message.contains("θ < Θ"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("theta = 2.0", "thetta = 2.0\ntheta = 2.0");
        match parse_config(&text).unwrap_err() {
            Error::Config { path, message } => {
                assert!(path.starts_with("bounds"), "{path}");
                assert!(message.contains("thetta"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_paths_rejected() {
        let text = format!("{MINIMAL}\n[simulate]\nhorizon = 10\nn_paths = 0\n");
        match parse_config(&text).unwrap_err() {
            Error::Config { path, .. } => assert_eq!(path, "simulate.n_paths"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn real_expressions() {
        assert_eq!(parse_real("pi"), Some(PI));
        assert_eq!(parse_real("pi/2"), Some(PI / 2.0));
        assert_eq!(parse_real("3*pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_real("-2pi"), Some(-2.0 * PI));
        assert_eq!(parse_real("0.25"), Some(0.25));
        assert_eq!(parse_real("pie"), None);
        assert_eq!(parse_real("1/0"), None);
    }

    #[test]
    fn field_tables() {
        let text = MINIMAL.replace(
            "theta = 2.0",
            "theta = { profile = \"affine\", intercept = 1.0, slope = 0.1 }",
        );
        let c = parse_config(&text).unwrap();
        let b = c.bounds().unwrap();
        assert!((b.at(1.0).0 - 1.1).abs() < 1e-15);
        let bad = MINIMAL.replace(
            "theta = 2.0",
            "theta = { profile = \"affine\", intercept = 1.0, slop = 0.1 }",
        );
        assert!(parse_config(&bad).is_err());
    }
}
