//! Monte Carlo paths of the coordinate process, wealth of trading
//! strategies along them, and terminal-window growth rates.
//!
//! Paths follow `dX = c ∇log η_ref dt + σ dW`. The drift blows up at the
//! boundary, so the step is drift-implicit: with `z = X_k + σ(X_k) √dt ξ`,
//! `X_{k+1}` solves `y - b(y) dt = z`. On a ball the drift is radial and the
//! solve reduces to one dimension along `z`.

mod saddle;
mod table;

pub use saddle::{
    minmax_experiment, SaddleCell, SaddleConfig, SaddleReport, ScenarioSummary, SCENARIO_LOWER, SCENARIO_UPPER,
};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, Grid};
use crate::eigen::EigenPair;
use crate::error::{Error, Result};
use crate::fields::CovarianceField;
use crate::seed;

use table::{CoefficientTable, EtaTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub dt: f64,
    pub horizon: f64,
    /// Start point; `None` starts at the normalization point of the eigenfunction.
    pub x0: Option<Vec<f64>>,
    pub seed: u64,
    /// Paths closer than this to the boundary are stopped and flagged.
    pub guard: f64,
    /// Each step's Gaussian increment is the normalized sum of this many
    /// stream draws, so `(dt, 2 substeps)` and `(dt/2, 1 substep)` share
    /// Brownian paths.
    pub substeps: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 1.0,
            x0: None,
            seed: 0,
            guard: 1e-3,
            substeps: 1,
        }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::input("dt must be positive"));
        }
        if !(self.horizon >= 1.0 && self.horizon.is_finite()) {
            return Err(Error::input("horizon T must be at least 1"));
        }
        if self.dt > self.horizon {
            return Err(Error::input("dt exceeds the horizon"));
        }
        if !(self.guard >= 0.0) {
            return Err(Error::input("boundary guard must be nonnegative"));
        }
        if self.substeps == 0 {
            return Err(Error::input("substeps must be at least 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Drift<'a> {
    None,
    /// `c ∇log η_ref`.
    Optimal(&'a EigenPair),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRecord {
    pub dim: usize,
    pub path_index: u64,
    pub times: Vec<f64>,
    /// Row-major, `dim` values per time.
    pub states: Vec<f64>,
    pub wealth: Vec<f64>,
    /// `log V_t`, `NaN` once wealth is non-positive.
    pub log_wealth: Vec<f64>,
    /// `e^{λ t} η(X_t)`.
    pub comparison: Vec<f64>,
    pub stopped: bool,
    pub stop_time: Option<f64>,
}

impl PathRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    /// `min_k V_k / (e^{λ t_k} η(X_k))`.
    pub fn min_bound_ratio(&self) -> Option<f64> {
        self.wealth
            .iter()
            .zip(&self.comparison)
            .map(|(v, b)| v / b)
            .reduce(f64::min)
    }

    /// `min_k (V_k - e^{λ t_k} η(X_k)) e^{-λ t_k}`.
    pub fn min_scaled_defect(&self, lambda: f64) -> Option<f64> {
        self.wealth
            .iter()
            .zip(&self.comparison)
            .zip(&self.times)
            .map(|((v, b), t)| (v - b) * (-lambda * t).exp())
            .reduce(f64::min)
    }
}

#[inline]
fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Root of `s - dt β(s) = target` in `(lo, hi)`. `β` returns the drift and
/// its slope; `φ` is increasing and tends to `-∞`/`+∞` at the open ends
/// where `η` vanishes. Newton with bisection safeguard.
fn implicit_solve(
    guess: f64,
    target: f64,
    dt: f64,
    mut lo: f64,
    mut hi: f64,
    beta: impl Fn(f64) -> Option<(f64, f64)>,
) -> Result<f64> {
    let mut s = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..200 {
        let (b, db) = beta(s).ok_or_else(|| Error::Evaluation(format!("drift undefined at {s}")))?;
        let phi = s - dt * b - target;
        if phi == 0.0 {
            return Ok(s);
        }
        if phi < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let slope = 1.0 - dt * db;
        let mut next = s - phi / slope;
        if !(slope > 0.0) || !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - s).abs() <= 1e-14 * (1.0 + s.abs()) || hi - lo <= 1e-15 * (1.0 + s.abs()) {
            return Ok(next);
        }
        s = next;
    }
    Err(Error::Internal("drift-implicit step did not converge".into()))
}

struct Stepper<'a> {
    domain: &'a Domain,
    coeffs: CoefficientTable,
    eta: Option<EtaTable>,
    dt: f64,
}

impl Stepper<'_> {
    /// `β(s) = c_r η'/η` and its slope.
    fn beta(&self, s: f64) -> Option<(f64, f64)> {
        let t = self.eta.as_ref()?;
        let (e, de) = t.eta.value_slope(s)?;
        let (g, dg) = t.grad.value_slope(s)?;
        let (c, dc) = self.coeffs.radial_slope(s)?;
        if !(e > 0.0) {
            return None;
        }
        let b = c * g / e;
        Some((b, (dc * g + c * dg) / e - b * de / e))
    }

    fn step(&self, x: &[f64], xi: &[f64], out: &mut [f64]) -> Result<()> {
        let sq = self.dt.sqrt();
        match self.domain {
            Domain::Interval { a, b } => {
                let (c, _) = self
                    .coeffs
                    .at(x[0])
                    .ok_or_else(|| Error::Evaluation(format!("state {} outside the domain", x[0])))?;
                let z = x[0] + c.sqrt() * sq * xi[0];
                out[0] = if self.eta.is_some() {
                    implicit_solve(x[0], z, self.dt, *a, *b, |s| self.beta(s))?
                } else {
                    z
                };
            }
            Domain::Ball { center, radius, .. } => {
                let r = norm_diff(x, center);
                let (cr, ct) = self
                    .coeffs
                    .at(r)
                    .ok_or_else(|| Error::Evaluation(format!("radius {r} outside the domain")))?;
                let (sr, st) = (cr.sqrt(), ct.sqrt());
                // σ ξ = √c_r (e·ξ) e + √c_t (ξ - (e·ξ) e)
                let along = if r > 0.0 {
                    x.iter()
                        .zip(center)
                        .zip(xi)
                        .map(|((p, q), w)| (p - q) / r * w)
                        .sum::<f64>()
                } else {
                    0.0
                };
                for i in 0..x.len() {
                    let e = if r > 0.0 { (x[i] - center[i]) / r } else { 0.0 };
                    let noise = if r > 0.0 {
                        st * xi[i] + (sr - st) * along * e
                    } else {
                        sr * xi[i]
                    };
                    out[i] = x[i] + sq * noise;
                }
                if self.eta.is_some() {
                    let rel: Vec<f64> = out.iter().zip(center).map(|(p, q)| p - q).collect();
                    let rz = norm(&rel);
                    if rz > 0.0 {
                        let s = implicit_solve(r, rz, self.dt, 0.0, *radius, |s| self.beta(s))?;
                        for i in 0..out.len() {
                            out[i] = center[i] + s * rel[i] / rz;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn norm_diff(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// Start point implied by the config, or the eigenfunction's normalization point.
pub fn start_point(cfg: &PathConfig, grid: &Grid, reference: Option<&EigenPair>) -> Result<Vec<f64>> {
    let domain = grid.domain();
    let x0 = match (&cfg.x0, reference) {
        (Some(p), _) => p.clone(),
        (None, Some(pair)) => coordinate_to_point(domain, pair.x0),
        (None, None) => domain.center_point(),
    };
    if x0.len() != domain.dim() || !domain.contains(&x0) {
        return Err(Error::input(format!("start point {x0:?} is not interior")));
    }
    Ok(x0)
}

/// The point at reduced coordinate `s` (along `e_1` on a ball).
pub fn coordinate_to_point(domain: &Domain, s: f64) -> Vec<f64> {
    match domain {
        Domain::Interval { .. } => vec![s],
        Domain::Ball { center, .. } => {
            let mut p = center.clone();
            p[0] += s;
            p
        }
    }
}

/// Simulates one path; `path_index` selects the keyed noise stream.
pub fn simulate_x(
    c: &CovarianceField,
    drift: Drift<'_>,
    cfg: &PathConfig,
    grid: &Grid,
    path_index: u64,
) -> Result<PathRecord> {
    cfg.validate()?;
    let domain = grid.domain();
    let dim = domain.dim();
    let eta = match drift {
        Drift::None => None,
        Drift::Optimal(pair) => Some(EtaTable::new(pair, grid)?),
    };
    let reference = match drift {
        Drift::Optimal(p) => Some(p),
        Drift::None => None,
    };
    let x0 = start_point(cfg, grid, reference)?;
    let stepper = Stepper {
        domain,
        coeffs: CoefficientTable::new(c, grid)?,
        eta,
        dt: cfg.dt,
    };
    let steps = cfg.steps();
    let mut rng = seed::stream(cfg.seed, seed::TAG_PATH, path_index);
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity((steps + 1) * dim);
    times.push(0.0);
    states.extend_from_slice(&x0);
    let mut x = x0;
    let mut next = vec![0.0; dim];
    let mut xi = vec![0.0; dim];
    let norm_sub = (cfg.substeps as f64).sqrt().recip();
    let (mut stopped, mut stop_time) = (false, None);
    for k in 1..=steps {
        xi.iter_mut().for_each(|v| *v = 0.0);
        for _ in 0..cfg.substeps {
            for v in xi.iter_mut() {
                *v += rng.sample::<f64, _>(StandardNormal);
            }
        }
        if cfg.substeps > 1 {
            xi.iter_mut().for_each(|v| *v *= norm_sub);
        }
        stepper.step(&x, &xi, &mut next)?;
        let t = k as f64 * cfg.dt;
        if !domain.contains(&next) || domain.distance_to_boundary(&next) < cfg.guard {
            stopped = true;
            stop_time = Some(t);
            break;
        }
        times.push(t);
        states.extend_from_slice(&next);
        std::mem::swap(&mut x, &mut next);
    }
    Ok(PathRecord {
        dim,
        path_index,
        times,
        states,
        wealth: Vec::new(),
        log_wealth: Vec::new(),
        comparison: Vec::new(),
        stopped,
        stop_time,
    })
}

/// Trading strategies, given as positions in the traded coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StrategySpec {
    /// `π*_t = e^{λ* t} ∇η*(X_t)`.
    PiStar,
    /// `π_t = κ V_t` per coordinate; a single weight is broadcast.
    ConstantProportion { kappa: Vec<f64> },
    /// Position `Δ(s, t)` along the reduced coordinate (radially outward on
    /// a ball), bilinear in a `(times × coords)` table, clamped in `t`.
    Custom {
        times: Vec<f64>,
        coords: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

impl StrategySpec {
    pub fn constant_proportion(kappa: f64) -> Self {
        StrategySpec::ConstantProportion { kappa: vec![kappa] }
    }

    pub fn label(&self) -> String {
        match self {
            StrategySpec::PiStar => "pi_star".into(),
            StrategySpec::ConstantProportion { kappa } => {
                let parts: Vec<String> = kappa.iter().map(|k| format!("{k}")).collect();
                format!("constant_proportion({})", parts.join(";"))
            }
            StrategySpec::Custom { .. } => "custom".into(),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            StrategySpec::PiStar => Ok(()),
            StrategySpec::ConstantProportion { kappa } => {
                if !(kappa.len() == 1 || kappa.len() == dim) || kappa.iter().any(|k| !k.is_finite()) {
                    return Err(Error::input(format!(
                        "constant proportion needs 1 or {dim} finite weights"
                    )));
                }
                Ok(())
            }
            StrategySpec::Custom { times, coords, values } => {
                let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
                if times.is_empty() || coords.len() < 2 || !sorted(times) || !sorted(coords) {
                    return Err(Error::input(
                        "custom strategy needs increasing time and coordinate knots",
                    ));
                }
                if values.len() != times.len() || values.iter().any(|r| r.len() != coords.len()) {
                    return Err(Error::input("custom strategy table has the wrong shape"));
                }
                Ok(())
            }
        }
    }
}

fn bracket(knots: &[f64], x: f64) -> (usize, f64) {
    if knots.len() == 1 || x <= knots[0] {
        return (0, 0.0);
    }
    let last = knots.len() - 1;
    if x >= knots[last] {
        return (last - 1, 1.0);
    }
    let j = knots.partition_point(|&k| k <= x) - 1;
    (j, (x - knots[j]) / (knots[j + 1] - knots[j]))
}

fn custom_position(times: &[f64], coords: &[f64], values: &[Vec<f64>], s: f64, t: f64) -> Option<f64> {
    if s < coords[0] || s > coords[coords.len() - 1] {
        return None;
    }
    let (j, w) = bracket(coords, s);
    let row = |r: &[f64]| (1.0 - w) * r[j] + w * r[j + 1];
    if times.len() == 1 {
        return Some(row(&values[0]));
    }
    let (i, v) = bracket(times, t);
    Some((1.0 - v) * row(&values[i]) + v * row(&values[i + 1]))
}

struct WealthEval<'a> {
    domain: &'a Domain,
    eta: EtaTable,
    lambda: f64,
}

impl WealthEval<'_> {
    fn coordinate(&self, x: &[f64]) -> f64 {
        match self.domain {
            Domain::Interval { .. } => x[0],
            Domain::Ball { center, .. } => norm_diff(x, center),
        }
    }

    /// Unit direction of the reduced coordinate at `x`.
    fn direction(&self, x: &[f64], s: f64, out: &mut [f64]) {
        match self.domain {
            Domain::Interval { .. } => out[0] = 1.0,
            Domain::Ball { center, .. } => {
                for i in 0..x.len() {
                    out[i] = if s > 0.0 { (x[i] - center[i]) / s } else { 0.0 };
                }
            }
        }
    }

    fn bound(&self, x: &[f64], t: f64) -> Result<f64> {
        let s = self.coordinate(x);
        let e = self
            .eta
            .eta
            .value(s)
            .ok_or_else(|| Error::Evaluation(format!("state at {s} outside the eigenfunction table")))?;
        Ok((self.lambda * t).exp() * e)
    }

    /// Position in units of the wealth scale `e^scale`.
    fn position(&self, strategy: &StrategySpec, x: &[f64], t: f64, m: f64, scale: f64, out: &mut [f64]) -> Result<()> {
        let s = self.coordinate(x);
        let outside = || Error::Evaluation(format!("state at {s} outside the interpolation range"));
        match strategy {
            StrategySpec::PiStar => {
                let g = self.eta.grad.value(s).ok_or_else(outside)?;
                self.direction(x, s, out);
                let factor = (self.lambda * t - scale).exp() * g;
                out.iter_mut().for_each(|o| *o *= factor);
            }
            StrategySpec::ConstantProportion { kappa } => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = kappa[if kappa.len() == 1 { 0 } else { i }] * m;
                }
            }
            StrategySpec::Custom { times, coords, values } => {
                let p = custom_position(times, coords, values, s, t).ok_or_else(outside)? * (-scale).exp();
                self.direction(x, s, out);
                out.iter_mut().for_each(|o| *o *= p);
            }
        }
        Ok(())
    }
}

/// Fills `wealth` with `V_{k+1} = V_k + π(t_k, X_k)·(X_{k+1} - X_k)`, `V_0 = 1`,
/// and `comparison` with `e^{λ t} η(X_t)` for the given eigenpair.
pub fn wealth_path(
    path: &PathRecord,
    lambda_star: f64,
    eigenpair: &EigenPair,
    grid: &Grid,
    strategy: &StrategySpec,
) -> Result<PathRecord> {
    let w = wealth_series(path, lambda_star, eigenpair, grid, strategy)?;
    Ok(PathRecord {
        wealth: w.wealth,
        log_wealth: w.log_wealth,
        comparison: w.comparison,
        ..path.clone()
    })
}

fn wealth_series(
    path: &PathRecord,
    lambda_star: f64,
    eigenpair: &EigenPair,
    grid: &Grid,
    strategy: &StrategySpec,
) -> Result<WealthSeries> {
    let eval = WealthEval {
        domain: grid.domain(),
        eta: EtaTable::new(eigenpair, grid)?,
        lambda: lambda_star,
    };
    wealth_with(&eval, path, strategy)
}

/// Wealth, `log V` and `e^{λt} η(X_t)` along a path.
pub(crate) struct WealthSeries {
    pub wealth: Vec<f64>,
    /// `NaN` once wealth is non-positive.
    pub log_wealth: Vec<f64>,
    pub comparison: Vec<f64>,
}

// Wealth is carried as `m · e^s` so long horizons neither overflow for
// growing strategies nor underflow for decaying ones.
fn wealth_with(eval: &WealthEval<'_>, path: &PathRecord, strategy: &StrategySpec) -> Result<WealthSeries> {
    let dim = path.dim;
    if dim != eval.domain.dim() {
        return Err(Error::input("path and grid dimensions differ"));
    }
    strategy.validate(dim)?;
    let n = path.len();
    let mut out = WealthSeries {
        wealth: Vec::with_capacity(n),
        log_wealth: Vec::with_capacity(n),
        comparison: Vec::with_capacity(n),
    };
    let mut pi = vec![0.0; dim];
    let (mut m, mut scale) = (1.0_f64, 0.0_f64);
    for k in 0..n {
        let x = path.state(k);
        let t = path.times[k];
        out.wealth.push(m * scale.exp());
        out.log_wealth.push(if m > 0.0 { m.ln() + scale } else { f64::NAN });
        out.comparison.push(eval.bound(x, t)?);
        if k + 1 < n {
            eval.position(strategy, x, t, m, scale, &mut pi)?;
            let step: f64 = path
                .state(k + 1)
                .iter()
                .zip(x)
                .zip(&pi)
                .map(|((b, a), p)| p * (b - a))
                .sum();
            m += step;
            let mag = m.abs();
            if mag > 0.0 && !(1e-100..=1e100).contains(&mag) {
                scale += mag.ln();
                m = m.signum();
            }
        }
    }
    Ok(out)
}

/// Average of `t⁻¹ log V_t` over sampled times in `[t_min, t_max]`.
pub fn growth_rate(path: &PathRecord, window: (f64, f64)) -> Result<f64> {
    growth_from(&path.times, &path.log_wealth, &path.wealth, path.path_index, window)
}

fn growth_from(times: &[f64], log_wealth: &[f64], wealth: &[f64], path_index: u64, window: (f64, f64)) -> Result<f64> {
    if log_wealth.len() != times.len() || wealth.len() != times.len() || wealth.is_empty() {
        return Err(Error::input("path has no wealth series"));
    }
    let (t_min, t_max) = window;
    if !(t_min <= t_max) {
        return Err(Error::input("growth window is empty"));
    }
    if let Some(k) = log_wealth.iter().position(|v| v.is_nan()) {
        return Err(Error::PositivityViolation {
            path: path_index,
            time: times[k],
            wealth: wealth[k],
        });
    }
    let (mut sum, mut count) = (0.0, 0usize);
    for (&t, &l) in times.iter().zip(log_wealth) {
        if t > 0.0 && t >= t_min && t <= t_max {
            sum += l / t;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Evaluation(format!(
            "no sampled times in the window [{t_min}, {t_max}]"
        )));
    }
    Ok(sum / count as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSummary {
    pub dt: f64,
    pub substeps: usize,
    pub n_paths: usize,
    pub stopped: usize,
    /// Paths on which `π*` wealth reached zero or below.
    pub ruined: usize,
    /// `min` over paths and times of `V*_t / (e^{λ*t} η*(X_t))`.
    pub worst_ratio: f64,
    /// `min` over paths and times of `(V*_t - e^{λ*t} η*(X_t)) e^{-λ*t}`.
    pub worst_scaled_defect: f64,
    /// Mean growth rate of `π*` over the unstopped, unruined paths.
    pub mean_growth: f64,
    pub growth_sd: f64,
}

/// Runs `n_paths` paths under `c` with the drift of `reference` and
/// tracks `π*` (built from `star`) against its pathwise lower bound.
/// Returns the summary and the first `keep` paths with wealth filled.
#[allow(clippy::too_many_arguments)]
pub fn bound_ensemble(
    c: &CovarianceField,
    reference: &EigenPair,
    star: &EigenPair,
    grid: &Grid,
    cfg: &PathConfig,
    n_paths: usize,
    window_start: f64,
    keep: usize,
) -> Result<(BoundSummary, Vec<PathRecord>)> {
    use rayon::prelude::*;
    if n_paths == 0 {
        return Err(Error::input("n_paths must be positive"));
    }
    let mut cfg = cfg.clone();
    if cfg.x0.is_none() {
        cfg.x0 = Some(coordinate_to_point(grid.domain(), star.x0));
    }
    let window = (window_start * cfg.horizon, cfg.horizon);
    let eval = WealthEval {
        domain: grid.domain(),
        eta: EtaTable::new(star, grid)?,
        lambda: star.lambda,
    };
    type PerPath = (bool, Option<(f64, f64, Option<f64>)>, Option<PathRecord>);
    let per_path = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| -> Result<PerPath> {
            let path = simulate_x(c, Drift::Optimal(reference), &cfg, grid, i)?;
            if path.stopped {
                return Ok((true, None, (i < keep as u64).then_some(path)));
            }
            let w = wealth_with(&eval, &path, &StrategySpec::PiStar)?;
            let ratio = w
                .wealth
                .iter()
                .zip(&w.comparison)
                .map(|(v, b)| v / b)
                .fold(f64::INFINITY, f64::min);
            let defect = w
                .wealth
                .iter()
                .zip(&w.comparison)
                .zip(&path.times)
                .map(|((v, b), t)| (v - b) * (-star.lambda * t).exp())
                .fold(f64::INFINITY, f64::min);
            let rate = match growth_from(&path.times, &w.log_wealth, &w.wealth, i, window) {
                Ok(r) => Some(r),
                Err(Error::PositivityViolation { .. }) => None,
                Err(e) => return Err(e),
            };
            let kept = (i < keep as u64).then_some(PathRecord {
                wealth: w.wealth,
                log_wealth: w.log_wealth,
                comparison: w.comparison,
                ..path
            });
            Ok((false, Some((ratio, defect, rate)), kept))
        })
        .collect::<Result<Vec<_>>>()?;
    let stopped = per_path.iter().filter(|p| p.0).count();
    let stats: Vec<_> = per_path.iter().filter_map(|p| p.1).collect();
    let rates: Vec<f64> = stats.iter().filter_map(|s| s.2).collect();
    let n = rates.len() as f64;
    let mean = rates.iter().sum::<f64>() / n;
    let sd = if rates.len() > 1 {
        (rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let summary = BoundSummary {
        dt: cfg.dt,
        substeps: cfg.substeps,
        n_paths,
        stopped,
        ruined: stats.iter().filter(|s| s.2.is_none()).count(),
        worst_ratio: stats.iter().map(|s| s.0).fold(f64::INFINITY, f64::min),
        worst_scaled_defect: stats.iter().map(|s| s.1).fold(f64::INFINITY, f64::min),
        mean_growth: mean,
        growth_sd: sd,
    };
    let kept = per_path.into_iter().filter_map(|p| p.2).collect();
    Ok((summary, kept))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalvingStudy {
    pub coarse: BoundSummary,
    pub fine: BoundSummary,
    /// `worst defect(dt) / worst defect(dt/2)` for the scaled defect `(V - e^{λt}η) e^{-λt}`.
    pub defect_factor: f64,
    /// Same ratio for the relative defect `1 - V/(e^{λt}η)`.
    pub relative_factor: f64,
}

/// Pathwise bound at `dt` and `dt/2` on coupled Brownian paths.
pub fn halving_study(
    c: &CovarianceField,
    reference: &EigenPair,
    star: &EigenPair,
    grid: &Grid,
    cfg: &PathConfig,
    n_paths: usize,
) -> Result<HalvingStudy> {
    let coarse_cfg = PathConfig {
        substeps: 2 * cfg.substeps,
        ..cfg.clone()
    };
    let fine_cfg = PathConfig {
        dt: 0.5 * cfg.dt,
        ..cfg.clone()
    };
    let (coarse, _) = bound_ensemble(c, reference, star, grid, &coarse_cfg, n_paths, 0.5, 0)?;
    let (fine, _) = bound_ensemble(c, reference, star, grid, &fine_cfg, n_paths, 0.5, 0)?;
    let defect = |s: &BoundSummary| (-s.worst_scaled_defect).max(0.0);
    let relative = |s: &BoundSummary| (1.0 - s.worst_ratio).max(0.0);
    Ok(HalvingStudy {
        defect_factor: defect(&coarse) / defect(&fine),
        relative_factor: relative(&coarse) / relative(&fine),
        coarse,
        fine,
    })
}

/// Writes a path as CSV rows `t, x_1..x_d, V, bound`, keeping every `every`-th sample.
pub fn path_rows(path: &PathRecord, every: usize) -> Vec<Vec<f64>> {
    let every = every.max(1);
    (0..path.len())
        .filter(|k| k % every == 0 || *k + 1 == path.len())
        .map(|k| {
            let mut row = vec![path.times[k]];
            row.extend_from_slice(path.state(k));
            row.push(path.wealth.get(k).copied().unwrap_or(f64::NAN));
            row.push(path.comparison.get(k).copied().unwrap_or(f64::NAN));
            row
        })
        .collect()
}
