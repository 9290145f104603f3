use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Grid;
use crate::eigen::{principal_eig_linear, principal_eig_pucci, EigenPair, SolverConfig};
use crate::error::{Error, Result};
use crate::fields::{sample_covariance, BoundFields, CovarianceField, SamplerSpec};
use crate::robust::Verdict;
use crate::seed;

use super::table::EtaTable;
use super::{growth_from, simulate_x, wealth_with, Drift, PathConfig, StrategySpec, WealthEval};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleConfig {
    pub path: PathConfig,
    pub n_paths: usize,
    /// Alternatives to `π*`.
    pub strategies: Vec<StrategySpec>,
    pub n_sampled: usize,
    pub family: SamplerSpec,
    pub tolerance: f64,
    /// The growth window is `[window_start · T, T]`.
    pub window_start: f64,
    pub solver: SolverConfig,
}

impl Default for SaddleConfig {
    fn default() -> Self {
        Self {
            path: PathConfig {
                horizon: 500.0,
                ..PathConfig::default()
            },
            n_paths: 200,
            strategies: vec![
                StrategySpec::constant_proportion(0.5),
                StrategySpec::constant_proportion(1.0),
            ],
            n_sampled: 3,
            family: SamplerSpec::Mixed,
            tolerance: 0.05,
            window_start: 0.5,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioSummary {
    pub name: String,
    /// Principal eigenvalue of `L^c`; its eigenfunction drives the paths.
    pub lambda_c: f64,
    pub stopped_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SaddleCell {
    pub scenario: String,
    pub strategy: String,
    pub n_paths: usize,
    /// Paths that reached `T` with positive wealth.
    pub completed: usize,
    pub stopped_count: usize,
    /// Paths whose wealth hit zero or below; excluded from the rate statistics.
    pub ruined_count: usize,
    pub mean_rate: f64,
    pub sd: f64,
    pub min_rate: f64,
    pub max_rate: f64,
    /// For `π*`: `min_t (V_t - e^{λ*t} η*(X_t)) e^{-λ*t}` over all unstopped paths.
    pub worst_scaled_defect: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SaddleReport {
    pub lambda_star: f64,
    pub tolerance: f64,
    pub window: (f64, f64),
    pub scenarios: Vec<ScenarioSummary>,
    pub cells: Vec<SaddleCell>,
    pub verdicts: Vec<Verdict>,
}

impl SaddleReport {
    pub fn cell(&self, scenario: &str, strategy: &str) -> Option<&SaddleCell> {
        self.cells
            .iter()
            .find(|c| c.scenario == scenario && c.strategy == strategy)
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn check(&self) -> Result<()> {
        match self.verdicts.iter().find(|v| !v.passed) {
            None => Ok(()),
            Some(v) => {
                let (strategy, scenario) = v.name.split_once('@').unwrap_or((&v.name, ""));
                Err(Error::SaddleViolation {
                    strategy: strategy.to_string(),
                    scenario: scenario.to_string(),
                    detail: v.detail.clone(),
                })
            }
        }
    }
}

enum Outcome {
    Rate(f64),
    Ruined,
}

struct PathResult {
    stopped: bool,
    outcomes: Vec<Outcome>,
    defect: Option<f64>,
}

pub const SCENARIO_LOWER: &str = "c=theta";
pub const SCENARIO_UPPER: &str = "c=Theta";

/// Growth rates of `π*` and the alternatives under the scenario measures
/// `c ≡ θ`, `c ≡ Θ` and sampled `c`, each driven by its own eigenfunction.
/// Strategies share the simulated paths of a scenario.
pub fn minmax_experiment(bounds: &BoundFields, grid: &Grid, cfg: &SaddleConfig) -> Result<SaddleReport> {
    cfg.path.validate()?;
    if cfg.n_paths == 0 {
        return Err(Error::input("n_paths must be positive"));
    }
    if !(cfg.window_start >= 0.0 && cfg.window_start < 1.0) {
        return Err(Error::input("window start must be a fraction in [0, 1)"));
    }
    let dim = grid.domain().dim();
    for s in &cfg.strategies {
        s.validate(dim)?;
    }
    let star = principal_eig_pucci(bounds, grid, &cfg.solver)?;
    let (lo, hi) = bounds.on_grid(grid);
    let mut scenarios = vec![
        (SCENARIO_LOWER.to_string(), CovarianceField::Scalar(lo)),
        (SCENARIO_UPPER.to_string(), CovarianceField::Scalar(hi)),
    ];
    for j in 0..cfg.n_sampled {
        let s = seed::derive(cfg.path.seed, seed::TAG_SCENARIO, j as u64);
        scenarios.push((format!("sampled-{j}"), sample_covariance(bounds, grid, cfg.family, s)?));
    }

    let mut strategies = vec![StrategySpec::PiStar];
    strategies.extend(cfg.strategies.iter().cloned());
    let window = (cfg.window_start * cfg.path.horizon, cfg.path.horizon);
    let eval = WealthEval {
        domain: grid.domain(),
        eta: EtaTable::new(&star, grid)?,
        lambda: star.lambda,
    };

    let mut summaries = Vec::new();
    let mut cells = Vec::new();
    for (name, c) in &scenarios {
        let own: EigenPair = principal_eig_linear(c, grid, &cfg.solver)?;
        let mut path_cfg = cfg.path.clone();
        path_cfg.seed = seed::derive(cfg.path.seed, seed::TAG_SCENARIO, hash_name(name));
        if path_cfg.x0.is_none() {
            path_cfg.x0 = Some(super::coordinate_to_point(grid.domain(), star.x0));
        }
        let results = (0..cfg.n_paths as u64)
            .into_par_iter()
            .map(|i| -> Result<PathResult> {
                let path = simulate_x(c, Drift::Optimal(&own), &path_cfg, grid, i)?;
                if path.stopped {
                    return Ok(PathResult {
                        stopped: true,
                        outcomes: Vec::new(),
                        defect: None,
                    });
                }
                let mut outcomes = Vec::with_capacity(strategies.len());
                let mut defect = None;
                for s in &strategies {
                    let w = wealth_with(&eval, &path, s)?;
                    if matches!(s, StrategySpec::PiStar) {
                        defect = w
                            .wealth
                            .iter()
                            .zip(&w.comparison)
                            .zip(&path.times)
                            .map(|((v, b), t)| (v - b) * (-star.lambda * t).exp())
                            .reduce(f64::min);
                    }
                    outcomes.push(match growth_from(&path.times, &w.log_wealth, &w.wealth, i, window) {
                        Ok(r) => Outcome::Rate(r),
                        Err(Error::PositivityViolation { .. }) => Outcome::Ruined,
                        Err(e) => return Err(e),
                    });
                }
                Ok(PathResult {
                    stopped: false,
                    outcomes,
                    defect,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let stopped = results.iter().filter(|r| r.stopped).count();
        summaries.push(ScenarioSummary {
            name: name.clone(),
            lambda_c: own.lambda,
            stopped_count: stopped,
        });
        for (k, s) in strategies.iter().enumerate() {
            let rates: Vec<f64> = results
                .iter()
                .filter(|r| !r.stopped)
                .filter_map(|r| match r.outcomes[k] {
                    Outcome::Rate(x) => Some(x),
                    Outcome::Ruined => None,
                })
                .collect();
            let ruined = results
                .iter()
                .filter(|r| !r.stopped && matches!(r.outcomes[k], Outcome::Ruined))
                .count();
            let n = rates.len() as f64;
            let mean = rates.iter().sum::<f64>() / n;
            let sd = if rates.len() > 1 {
                (rates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            cells.push(SaddleCell {
                scenario: name.clone(),
                strategy: s.label(),
                n_paths: cfg.n_paths,
                completed: rates.len(),
                stopped_count: stopped,
                ruined_count: ruined,
                mean_rate: mean,
                sd,
                min_rate: rates.iter().copied().fold(f64::INFINITY, f64::min),
                max_rate: rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                worst_scaled_defect: if matches!(s, StrategySpec::PiStar) {
                    results.iter().filter_map(|r| r.defect).reduce(f64::min)
                } else {
                    None
                },
            });
        }
    }

    let tol = cfg.tolerance;
    let mut verdicts = Vec::new();
    let pi_label = StrategySpec::PiStar.label();
    for cell in cells.iter().filter(|c| c.strategy == pi_label) {
        verdicts.push(Verdict::new(
            &format!("{}@{}", cell.strategy, cell.scenario),
            cell.completed > 0 && cell.mean_rate >= star.lambda - tol,
            format!(
                "mean growth {:.4} (sd {:.4}, {} of {} paths) vs λ* - tol = {:.4}",
                cell.mean_rate,
                cell.sd,
                cell.completed,
                cell.n_paths,
                star.lambda - tol
            ),
        ));
    }
    for cell in cells
        .iter()
        .filter(|c| c.scenario == SCENARIO_LOWER && c.strategy != pi_label)
    {
        verdicts.push(Verdict::new(
            &format!("{}@{}", cell.strategy, cell.scenario),
            cell.completed > 0 && cell.mean_rate <= star.lambda + tol,
            format!(
                "mean growth {:.4} ({} of {} paths) vs λ* + tol = {:.4}",
                cell.mean_rate,
                cell.completed,
                cell.n_paths,
                star.lambda + tol
            ),
        ));
    }

    let ruined: Vec<String> = cells
        .iter()
        .filter(|c| c.strategy == pi_label)
        .map(|c| format!("{}: {}", c.scenario, c.ruined_count))
        .collect();
    verdicts.push(Verdict::new(
        "pi_star_positive@all",
        cells
            .iter()
            .filter(|c| c.strategy == pi_label)
            .all(|c| c.ruined_count == 0),
        format!("paths with V* <= 0 per scenario: {}", ruined.join(", ")),
    ));

    Ok(SaddleReport {
        lambda_star: star.lambda,
        tolerance: tol,
        window,
        scenarios: summaries,
        cells,
        verdicts,
    })
}

fn hash_name(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    })
}
