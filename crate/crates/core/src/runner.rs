//! Orchestration: dispatches a [`RunConfig`] to the library, collects CSV
//! artifacts and verdicts, and writes everything in one final phase.
//!
//! Every CSV starts with a `config_hash` column. `manifest.json` holds the
//! config echo, results, verdicts and (only there) wall-clock timings.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Command, RunConfig, ScenarioName};
use crate::domain::{build_exhaustion, ShrinkRule};
use crate::eigen::{principal_eig_linear, principal_eig_pucci, EigenPair};
use crate::error::{Error, Result};
use crate::fields::{sample_covariance, CovarianceField};
use crate::robust::{construct_selection, exhaustion_limit, minmax_report, MinMaxSpec, Verdict};
use crate::seed;
use crate::sim::{bound_ensemble, halving_study, minmax_experiment, path_rows, PathConfig, SaddleConfig, StrategySpec};

pub const MANIFEST: &str = "manifest.json";

/// Keys in the manifest that vary between identical runs.
pub const TIMING_KEYS: [&str; 2] = ["timings", "wall_clock_seconds"];

struct Table {
    name: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Default)]
struct Run {
    tables: Vec<Table>,
    verdicts: Vec<Verdict>,
    timings: Vec<(String, f64)>,
    results: serde_json::Map<String, Value>,
}

impl Run {
    fn timed<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f();
        self.timings.push((name.to_string(), t.elapsed().as_secs_f64()));
        out
    }

    fn verdict(&mut self, name: &str, passed: bool, detail: String) {
        self.verdicts.push(Verdict::new(name, passed, detail));
    }

    fn result(&mut self, key: &str, value: impl serde::Serialize) -> Result<()> {
        self.results.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }
}

/// What a run produced; `exit_code` is 0 iff every verdict passed.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: Value,
    pub files: Vec<PathBuf>,
    pub exit_code: i32,
}

/// SHA-256 of the canonical JSON form of the config.
pub fn config_hash(cfg: &RunConfig) -> Result<String> {
    let text = serde_json::to_string(cfg)?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

/// Runs `command`, writes artifacts into `out`, and returns the outcome.
pub fn run(cfg: &RunConfig, command: Command, out: &Path) -> Result<RunOutcome> {
    if let Some(c) = cfg.command {
        if c != command {
            return Err(Error::config(
                "command",
                format!("config is for {:?}, but {:?} was requested", c.name(), command.name()),
            ));
        }
    }
    let hash = config_hash(cfg)?;
    let start = Instant::now();
    let mut run = Run::default();
    let status = dispatch(cfg, command, &mut run);
    let all_pass = run.verdicts.iter().all(|v| v.passed);
    let (status_text, error, exit_code) = match &status {
        Ok(()) if all_pass => ("pass", Value::Null, 0),
        Ok(()) => ("fail", Value::Null, 1),
        Err(e) => ("error", json!({"kind": e.kind(), "message": e.to_string()}), 2),
    };

    fs::create_dir_all(out)?;
    let mut files = Vec::new();
    for t in &run.tables {
        let path = out.join(format!("{}.csv", t.name));
        let mut w = csv::Writer::from_path(&path)?;
        let mut header = vec!["config_hash".to_string()];
        header.extend(t.header.iter().cloned());
        w.write_record(&header)?;
        for row in &t.rows {
            let mut r = vec![hash.clone()];
            r.extend(row.iter().cloned());
            w.write_record(&r)?;
        }
        w.flush()?;
        files.push(path);
    }
    let timings: serde_json::Map<String, Value> = run.timings.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let manifest = json!({
        "artifact": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command.name(),
        "status": status_text,
        "config_hash": hash,
        "config": serde_json::to_value(cfg)?,
        "results": Value::Object(run.results),
        "verdicts": serde_json::to_value(&run.verdicts)?,
        "files": run.tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>(),
        "error": error,
        "timings": Value::Object(timings),
        "wall_clock_seconds": start.elapsed().as_secs_f64(),
    });
    let path = out.join(MANIFEST);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    files.push(path);
    Ok(RunOutcome {
        manifest,
        files,
        exit_code,
    })
}

/// Manifest for a run that failed before the config could be used.
pub fn write_error_manifest(out: &Path, command: &str, err: &Error) -> Result<()> {
    fs::create_dir_all(out)?;
    let manifest = json!({
        "artifact": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "status": "error",
        "verdicts": [],
        "error": {"kind": err.kind(), "message": err.to_string()},
    });
    fs::write(out.join(MANIFEST), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

fn dispatch(cfg: &RunConfig, command: Command, run: &mut Run) -> Result<()> {
    match command {
        Command::EigLinear => eig_linear(cfg, run),
        Command::EigPucci => eig_pucci(cfg, run),
        Command::Minmax => minmax(cfg, run),
        Command::Exhaust => exhaust(cfg, run),
        Command::Select => select(cfg, run),
        Command::Simulate => simulate(cfg, run),
        Command::Saddle => saddle(cfg, run),
    }
}

fn eigen_table(pair: &EigenPair, grid: &crate::domain::Grid) -> Table {
    let mut t = Table::new("eigenfunction", &["coordinate", "eta"]);
    for (s, e) in grid.nodes().iter().zip(&pair.eta) {
        t.push(vec![num(*s), num(*e)]);
    }
    t
}

fn eigen_summary(pair: &EigenPair) -> Value {
    json!({
        "lambda": pair.lambda,
        "residual": pair.residual,
        "iterations": pair.iterations,
        "N": pair.n,
        "x0": pair.x0,
        "max_eta": pair.max_eta(),
        "policy": pair.policy,
    })
}

fn expect_lambda(cfg: &RunConfig, run: &mut Run, lambda: f64) {
    if let Some(want) = cfg.expect.as_ref().and_then(|e| e.lambda.map(|l| (l.get(), e.rel_tol))) {
        let rel = (lambda - want.0).abs() / want.0.abs();
        run.verdict(
            "lambda_matches_expected",
            rel <= want.1,
            format!(
                "λ = {lambda}, expected {} (relative error {rel:.3e}, tolerance {})",
                want.0, want.1
            ),
        );
    }
}

fn eig_linear(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    let grid = cfg.grid()?;
    let c = cfg
        .covariance
        .as_ref()
        .ok_or_else(|| Error::config("covariance", "eig-linear needs a [covariance] section"))?
        .build(&grid)?;
    let solver = cfg.solver.build();
    let pair = run.timed("principal_eig_linear", || principal_eig_linear(&c, &grid, &solver))?;
    run.verdict(
        "eigenpair_converged",
        true,
        format!("{} iterations, residual {:.3e}", pair.iterations, pair.residual),
    );
    expect_lambda(cfg, run, pair.lambda);
    run.result("eigenpair", eigen_summary(&pair))?;
    run.tables.push(eigen_table(&pair, &grid));
    Ok(())
}

fn eig_pucci(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    let grid = cfg.grid()?;
    let bounds = cfg.bounds()?;
    let solver = cfg.solver.build();
    let pair = run.timed("principal_eig_pucci", || principal_eig_pucci(&bounds, &grid, &solver))?;
    run.verdict(
        "eigenpair_converged",
        true,
        format!("{} iterations, residual {:.3e}", pair.iterations, pair.residual),
    );
    expect_lambda(cfg, run, pair.lambda);
    if let (Some(want), Some(policy)) = (cfg.expect.as_ref().and_then(|e| e.policy.clone()), &pair.policy) {
        let (upper, total) = (policy.radial_upper, policy.nodes);
        let tangential_upper = policy.tangential_upper;
        let ok = if want == "theta" {
            upper == 0 && tangential_upper == 0
        } else {
            upper == total && (grid.tangential_multiplicity() == 0 || tangential_upper == total)
        };
        run.verdict(
            "policy_matches_expected",
            ok,
            format!("{upper} of {total} nodes use Θ radially; expected all {want}"),
        );
    }
    run.result("eigenpair", eigen_summary(&pair))?;
    run.tables.push(eigen_table(&pair, &grid));
    Ok(())
}

fn minmax(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    let grid = cfg.grid()?;
    let bounds = cfg.bounds()?;
    let section = cfg.minmax.clone().unwrap_or_default();
    let spec = MinMaxSpec {
        n_samples: section.n_samples,
        m_list: section.m.clone(),
        seed: cfg.seed,
        family: section.sampler,
        solver: cfg.solver.build(),
        monotone_slack: section.monotone_slack,
    };
    let report = run.timed("minmax_report", || minmax_report(&bounds, &grid, &spec))?;
    let mut samples = Table::new(
        "samples",
        &["index", "seed", "family", "lambda", "lambda_minus_lambda_star"],
    );
    for (i, s) in report.samples.iter().enumerate() {
        samples.push(vec![
            i.to_string(),
            s.seed.to_string(),
            s.family.clone(),
            num(s.lambda),
            num(s.lambda - report.lambda_star),
        ]);
    }
    let mut sel = Table::new("selection", &["m", "lambda", "gap", "bound", "defect", "kappa"]);
    for s in &report.selection {
        sel.push(vec![
            s.m.to_string(),
            num(s.lambda),
            num(s.gap),
            num(3.0 / s.m as f64 + report.eps_grid),
            num(s.defect),
            num(s.kappa),
        ]);
    }
    run.tables.push(samples);
    run.tables.push(sel);
    run.verdicts.extend(report.verdicts.iter().cloned());
    run.result(
        "minmax",
        json!({
            "lambda_star": report.lambda_star,
            "lambda_star_fine": report.lambda_star_fine,
            "eps_grid": report.eps_grid,
            "tolerance_budget": report.tolerance_budget,
            "lambda_min_sampled": report.lambda_min_sampled,
            "n_samples": report.samples.len(),
            "fitted_c": report.fitted_c,
        }),
    )?;
    Ok(())
}

fn select(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    let grid = cfg.grid()?;
    let bounds = cfg.bounds()?;
    let solver = cfg.solver.build();
    let section = cfg.select.clone().unwrap_or_default();
    let star = run.timed("principal_eig_pucci", || principal_eig_pucci(&bounds, &grid, &solver))?;
    let mut table = Table::new(
        "selection",
        &[
            "m",
            "coordinate",
            "gamma",
            "Gamma",
            "c_m_radial",
            "c_m_tangential",
            "c_smooth_radial",
            "c_smooth_tangential",
        ],
    );
    let mut summaries = Vec::new();
    for &m in &section.m {
        let sel = run.timed(&format!("construct_selection_m{m}"), || {
            construct_selection(&star, &bounds, &grid, m)
        })?;
        let raw = sel.c_m.frame(&grid)?;
        let smooth = sel.c_m_smooth.frame(&grid)?;
        for i in 0..grid.len() {
            table.push(vec![
                m.to_string(),
                num(grid.nodes()[i]),
                num(sel.gamma[i]),
                num(sel.upper_gamma[i]),
                num(raw.radial[i]),
                num(raw.tangential[i]),
                num(smooth.radial[i]),
                num(smooth.tangential[i]),
            ]);
        }
        let budget = 3.0 / m as f64;
        run.verdict(
            &format!("selection_defect_m{m}"),
            sel.sup_defect <= budget + sel.allowance,
            format!(
                "sup defect {:.3e} vs 3/m + allowance = {:.3e}",
                sel.sup_defect,
                budget + sel.allowance
            ),
        );
        summaries.push(json!({
            "m": m,
            "kappa": sel.kappa,
            "xi": sel.xi,
            "beta": sel.beta,
            "smoothing_width": sel.smoothing_width,
            "max_smoothing_change": sel.max_smoothing_change,
            "sup_defect": sel.sup_defect,
            "allowance": sel.allowance,
        }));
    }
    run.tables.push(table);
    run.result("lambda_star", star.lambda)?;
    run.result("selection", summaries)?;
    Ok(())
}

fn exhaust(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    let section = cfg
        .exhaust
        .clone()
        .ok_or_else(|| Error::config("exhaust", "exhaust needs an [exhaust] section with n_max"))?;
    let region = cfg.domain.region()?;
    let bounds = cfg.bounds()?;
    let rule = ShrinkRule { offset: section.offset };
    let family = build_exhaustion(&region, section.n_max, rule)?;
    let limit = section.known_limit.map(|l| l.get());
    let report = run.timed("exhaustion_limit", || {
        exhaustion_limit(
            &region,
            &bounds,
            section.n_max,
            section.policy(&cfg.grid),
            rule,
            &cfg.solver.build(),
            limit,
        )
    })?;
    let mut table = Table::new("exhaustion", &["n", "domain", "extent", "lambda"]);
    for (k, d) in family.members.iter().enumerate() {
        table.push(vec![
            report.n[k].to_string(),
            d.to_string(),
            num(report.extents[k]),
            num(report.lambdas[k]),
        ]);
    }
    run.tables.push(table);
    run.verdict(
        "nonincreasing",
        report.nonincreasing,
        format!(
            "λ*(E_n) nonincreasing within {}",
            crate::robust::EXHAUSTION_MONOTONE_TOL
        ),
    );
    run.verdict(
        "strictly_decreasing",
        report.strictly_decreasing,
        "λ*(E_{n+1}) < λ*(E_n) for every n".into(),
    );
    if let (Some(tol), Some(gap)) = (section.limit_tol, report.final_gap) {
        run.verdict(
            "limit_gap",
            gap <= tol,
            format!("λ*(E_{}) - limit = {gap:.4e}, tolerance {tol}", section.n_max),
        );
    }
    run.result("exhaustion", &report)?;
    Ok(())
}

fn scenario_field(cfg: &RunConfig, which: ScenarioName, grid: &crate::domain::Grid) -> Result<CovarianceField> {
    let bounds = cfg.bounds()?;
    let (lo, hi) = bounds.on_grid(grid);
    Ok(match which {
        ScenarioName::Lower => CovarianceField::Scalar(lo),
        ScenarioName::Upper => CovarianceField::Scalar(hi),
        ScenarioName::Sampled => {
            let family = cfg.simulate.as_ref().map(|s| s.sampler).unwrap_or_default();
            let s = seed::derive(cfg.seed, seed::TAG_SCENARIO, 0);
            sample_covariance(&bounds, grid, family, s)?
        }
    })
}

fn simulate(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    let section = cfg
        .simulate
        .clone()
        .ok_or_else(|| Error::config("simulate", "simulate needs a [simulate] section"))?;
    let grid = cfg.grid()?;
    let bounds = cfg.bounds()?;
    let solver = cfg.solver.build();
    let star = run.timed("principal_eig_pucci", || principal_eig_pucci(&bounds, &grid, &solver))?;
    let c = scenario_field(cfg, section.scenario, &grid)?;
    let reference = run.timed("principal_eig_linear", || principal_eig_linear(&c, &grid, &solver))?;
    let path_cfg = PathConfig {
        dt: section.dt,
        horizon: section.horizon,
        x0: None,
        seed: cfg.seed,
        guard: section.guard,
        substeps: section.substeps,
    };
    let (summary, kept) = run.timed("bound_ensemble", || {
        bound_ensemble(
            &c,
            &reference,
            &star,
            &grid,
            &path_cfg,
            section.n_paths,
            section.window_start,
            section.keep_paths,
        )
    })?;
    let dim = grid.domain().dim();
    let mut header: Vec<String> = vec!["path".into(), "t".into()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    header.extend(["V".into(), "bound".into()]);
    let header_ref: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut paths = Table::new("paths", &header_ref);
    for p in &kept {
        for row in path_rows(p, section.csv_every) {
            let mut r = vec![p.path_index.to_string()];
            r.extend(row.into_iter().map(num));
            paths.push(r);
        }
    }
    run.tables.push(paths);

    run.verdict(
        "pi_star_positive",
        summary.ruined == 0,
        format!("{} of {} paths reached V* <= 0", summary.ruined, summary.n_paths),
    );
    if let Some(tol) = section.ratio_tol {
        run.verdict(
            "pathwise_bound_ratio",
            summary.worst_ratio >= 1.0 - tol,
            format!(
                "min V*/(e^(λt) η*) = {:.4}, required >= {}",
                summary.worst_ratio,
                1.0 - tol
            ),
        );
    }
    if let Some(want) = section.expected_growth {
        let err = (summary.mean_growth - want.get()).abs();
        run.verdict(
            "growth_rate",
            err <= section.growth_tol,
            format!(
                "mean growth {:.4} (sd {:.4}) vs {} ± {}",
                summary.mean_growth,
                summary.growth_sd,
                want.get(),
                section.growth_tol
            ),
        );
    }
    let mut ensembles = Table::new(
        "ensemble",
        &[
            "dt",
            "substeps",
            "n_paths",
            "stopped",
            "ruined",
            "worst_ratio",
            "worst_scaled_defect",
            "mean_growth",
            "growth_sd",
        ],
    );
    let mut push = |s: &crate::sim::BoundSummary| {
        ensembles.push(vec![
            num(s.dt),
            s.substeps.to_string(),
            s.n_paths.to_string(),
            s.stopped.to_string(),
            s.ruined.to_string(),
            num(s.worst_ratio),
            num(s.worst_scaled_defect),
            num(s.mean_growth),
            num(s.growth_sd),
        ])
    };
    push(&summary);
    if let Some(factor) = section.halving_factor {
        let study = run.timed("halving_study", || {
            halving_study(&c, &reference, &star, &grid, &path_cfg, section.n_paths)
        })?;
        push(&study.coarse);
        push(&study.fine);
        run.verdict(
            "halving_reduces_defect",
            study.defect_factor >= factor,
            format!(
                "worst scaled defect {:.4e} -> {:.4e} (factor {:.3}, required >= {factor})",
                study.coarse.worst_scaled_defect, study.fine.worst_scaled_defect, study.defect_factor
            ),
        );
        run.result("halving", &study)?;
    }
    run.tables.push(ensembles);
    run.result("lambda_star", star.lambda)?;
    run.result("lambda_scenario", reference.lambda)?;
    run.result("ensemble", &summary)?;
    Ok(())
}

fn saddle(cfg: &RunConfig, run: &mut Run) -> Result<()> {
    let section = cfg
        .saddle
        .clone()
        .ok_or_else(|| Error::config("saddle", "saddle needs a [saddle] section"))?;
    let grid = cfg.grid()?;
    let bounds = cfg.bounds()?;
    let sc = SaddleConfig {
        path: PathConfig {
            dt: section.dt,
            horizon: section.horizon,
            x0: None,
            seed: cfg.seed,
            guard: section.guard,
            substeps: section.substeps,
        },
        n_paths: section.n_paths,
        strategies: section
            .proportions
            .iter()
            .map(|&k| StrategySpec::constant_proportion(k))
            .collect(),
        n_sampled: section.n_sampled,
        family: section.sampler,
        tolerance: section.tolerance,
        window_start: section.window_start,
        solver: cfg.solver.build(),
    };
    let report = run.timed("minmax_experiment", || minmax_experiment(&bounds, &grid, &sc))?;
    let mut cells = Table::new(
        "saddle",
        &[
            "scenario",
            "strategy",
            "n_paths",
            "completed",
            "stopped_count",
            "ruined_count",
            "mean_rate",
            "sd",
            "min_rate",
            "max_rate",
        ],
    );
    for c in &report.cells {
        cells.push(vec![
            c.scenario.clone(),
            c.strategy.clone(),
            c.n_paths.to_string(),
            c.completed.to_string(),
            c.stopped_count.to_string(),
            c.ruined_count.to_string(),
            num(c.mean_rate),
            num(c.sd),
            num(c.min_rate),
            num(c.max_rate),
        ]);
    }
    run.tables.push(cells);
    run.verdicts.extend(report.verdicts.iter().cloned());
    run.result("saddle", &report)?;
    Ok(())
}
