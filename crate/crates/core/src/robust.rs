//! Numerical witnesses for `λ*(D) = inf_{c ∈ C} λ^{*,c}(D)`.
//!
//! The infimum is bracketed from both sides: sampled admissible fields give
//! `λ^{*,c} ≥ λ*` (dominance), and the constructed near-maximizer `c_m`
//! gives `λ^{*,c_m} ≤ λ* + O(1/m)` (selection).

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{build_exhaustion, Domain, Grid, Region, ShrinkRule};
use crate::eigen::{
    discrete_hessian, hessian_with_stride, principal_eig_linear, principal_eig_pucci, EigenPair, HessianField,
    SolverConfig,
};
use crate::error::{Error, Result};
use crate::fields::{
    gaussian_smooth, sample_covariance, validate_covariance, BoundFields, CovarianceField, SamplerSpec,
};
use crate::pucci::{optimal_weight, pucci_plus_eigenvalues};
use crate::seed;

const BISECTION_STEPS: usize = 80;
const MAX_SMOOTHING_HALVINGS: usize = 80;

/// Near-optimal covariance for a fixed eigenfunction, before and after mollification.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionField {
    pub m: usize,
    pub kappa: f64,
    pub xi: f64,
    /// `β`: max-norm perturbation of `c` that moves `L^c η_D` by less than `1/m`.
    pub beta: f64,
    /// Shrunken envelope `γ = θ + (κ∧ξ)/4`.
    pub gamma: Vec<f64>,
    /// Shrunken envelope `Γ = Θ - (κ∧ξ)/4`.
    pub upper_gamma: Vec<f64>,
    pub c_m: CovarianceField,
    pub c_m_smooth: CovarianceField,
    /// Gaussian width (in nodes) actually used; 0 means no smoothing was admissible.
    pub smoothing_width: f64,
    pub max_smoothing_change: f64,
    /// `max_x F(x, D²η_D) - L^{c_m_smooth} η_D(x)`.
    pub sup_defect: f64,
    /// Movement of the defect certificate when the Hessian is taken at spacing `2h`.
    pub allowance: f64,
}

fn l_apply(h: &HessianField, i: usize, radial: f64, tangential: f64) -> f64 {
    0.5 * (radial * h.radial[i] + h.tangential_multiplicity as f64 * tangential * h.tangential[i])
}

fn frame_of(c: &CovarianceField, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>)> {
    let f = c.frame(grid)?;
    Ok((f.radial, f.tangential))
}

/// Builds `c_m` from the Pucci eigenfunction `η_D`.
///
/// `κ` is the largest value (found by bisection on directly re-evaluated
/// `M⁺`) such that moving `(θ, Θ)` by at most `κ` changes
/// `M⁺(D²η_D)` by less than `2/m` at every node.
pub fn construct_selection(
    eigenpair: &EigenPair,
    bounds: &BoundFields,
    grid: &Grid,
    m: usize,
) -> Result<SelectionField> {
    if m == 0 {
        return Err(Error::input("selection index m must be >= 1"));
    }
    bounds.check_grid(grid)?;
    let hess = discrete_hessian(&eigenpair.eta, grid)?;
    let (lo, hi) = bounds.on_grid(grid);
    let n = grid.len();
    let target = 2.0 / m as f64;
    let xi = bounds.min_gap(grid);

    let modulus = |kappa: f64| -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let e = hess.eigenvalues(i);
            let base = pucci_plus_eigenvalues(&e, lo[i], hi[i]);
            for (dl, du) in [(kappa, kappa), (kappa, -kappa), (-kappa, kappa), (-kappa, -kappa)] {
                let moved = pucci_plus_eigenvalues(&e, lo[i] + dl, hi[i] + du);
                worst = worst.max((moved - base).abs());
            }
        }
        worst
    };
    let kappa = if xi <= 0.0 || modulus(xi) < target {
        xi.max(0.0)
    } else {
        let (mut good, mut bad) = (0.0, xi);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (good + bad);
            if modulus(mid) < target {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let shrink = 0.25 * kappa.min(xi);
    let gamma: Vec<f64> = lo.iter().map(|l| l + shrink).collect();
    let upper_gamma: Vec<f64> = hi.iter().map(|u| u - shrink).collect();

    let pick = |values: &[f64]| -> Vec<f64> {
        values
            .iter()
            .enumerate()
            .map(|(i, &e)| optimal_weight(e, gamma[i], upper_gamma[i]))
            .collect()
    };
    let radial = pick(&hess.radial);
    let tangential = pick(&hess.tangential);
    let c_m = if grid.is_ball() {
        CovarianceField::Radial { radial, tangential }
    } else {
        CovarianceField::Scalar(radial)
    };

    let max_abs_sum = (0..n).map(|i| hess.abs_sum(i)).fold(0.0, f64::max);
    let beta = if max_abs_sum > 0.0 {
        2.0 / (m as f64 * max_abs_sum)
    } else {
        f64::INFINITY
    };
    let d = grid.domain().dim() as f64;
    let change_bound = beta.min(shrink) / d;

    let (c_r, c_t) = frame_of(&c_m, grid)?;
    let (mut width, mut smooth_r, mut smooth_t, mut change) = (0.0, c_r.clone(), c_t.clone(), 0.0);
    let mut sigma = 0.05 * n as f64;
    for _ in 0..MAX_SMOOTHING_HALVINGS {
        let sr = gaussian_smooth(&c_r, sigma);
        let st = gaussian_smooth(&c_t, sigma);
        let delta = sr
            .iter()
            .zip(&c_r)
            .chain(st.iter().zip(&c_t))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if delta < change_bound || delta == 0.0 {
            width = sigma;
            smooth_r = sr;
            smooth_t = st;
            change = delta;
            break;
        }
        sigma *= 0.5;
    }
    let c_m_smooth = if grid.is_ball() {
        CovarianceField::Radial {
            radial: smooth_r.clone(),
            tangential: smooth_t.clone(),
        }
    } else {
        CovarianceField::Scalar(smooth_r.clone())
    };
    let report = validate_covariance(&c_m_smooth, bounds, grid)?;
    if !report.passed {
        return Err(Error::Internal(format!(
            "mollified selection leaves the envelope by {} at node {}",
            report.max_violation, report.worst_node
        )));
    }

    let defect_with = |h: &HessianField| -> f64 {
        (0..n)
            .map(|i| {
                let f = 0.5 * pucci_plus_eigenvalues(&h.eigenvalues(i), lo[i], hi[i]);
                f - l_apply(h, i, smooth_r[i], smooth_t[i])
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let sup_defect = defect_with(&hess);
    let coarse = hessian_with_stride(&eigenpair.eta, grid, 2);
    let allowance = (0..n)
        .map(|i| {
            let fine = 0.5 * pucci_plus_eigenvalues(&hess.eigenvalues(i), lo[i], hi[i])
                - l_apply(&hess, i, smooth_r[i], smooth_t[i]);
            let rough = 0.5 * pucci_plus_eigenvalues(&coarse.eigenvalues(i), lo[i], hi[i])
                - l_apply(&coarse, i, smooth_r[i], smooth_t[i]);
            (fine - rough).abs()
        })
        .fold(0.0, f64::max);
    let budget = 3.0 / m as f64;
    if allowance > budget {
        return Err(Error::Resolution(format!(
            "discretization allowance {allowance:.3e} exceeds 3/m = {budget:.3e}; refine the grid"
        )));
    }
    if sup_defect > budget + allowance {
        return Err(Error::IdentityViolation(format!(
            "selection defect {sup_defect:.3e} exceeds 3/m + allowance = {:.3e}",
            budget + allowance
        )));
    }

    Ok(SelectionField {
        m,
        kappa,
        xi,
        beta,
        gamma,
        upper_gamma,
        c_m,
        c_m_smooth,
        smoothing_width: width,
        max_smoothing_change: change,
        sup_defect,
        allowance,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRecord {
    pub seed: u64,
    pub family: String,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionRecord {
    pub m: usize,
    pub lambda: f64,
    /// `λ^{*,c_m} - λ*(D)`.
    pub gap: f64,
    pub defect: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinMaxReport {
    pub lambda_star: f64,
    /// `λ*` on the grid with twice the nodes.
    pub lambda_star_fine: f64,
    /// `|λ*(N) - λ*(2N)|`.
    pub eps_grid: f64,
    /// `2 ε_grid + tol · λ*`.
    pub tolerance_budget: f64,
    pub samples: Vec<SampleRecord>,
    pub lambda_min_sampled: f64,
    pub selection: Vec<SelectionRecord>,
    /// Smallest `C` with `gap_m ≤ C/m + ε_grid` over the selection list.
    pub fitted_c: f64,
    pub verdicts: Vec<Verdict>,
}

impl MinMaxReport {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// Turns the first failed verdict into an identity-violation error.
    pub fn check(&self) -> Result<()> {
        match self.verdicts.iter().find(|v| !v.passed) {
            None => Ok(()),
            Some(v) => Err(Error::IdentityViolation(format!("{}: {}", v.name, v.detail))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinMaxSpec {
    pub n_samples: usize,
    pub m_list: Vec<usize>,
    pub seed: u64,
    pub family: SamplerSpec,
    pub solver: SolverConfig,
    /// Slack for the monotonicity of the selection gaps in `m`.
    pub monotone_slack: f64,
}

impl Default for MinMaxSpec {
    fn default() -> Self {
        Self {
            n_samples: 20,
            m_list: vec![5, 10, 20, 40],
            seed: 0,
            family: SamplerSpec::Mixed,
            solver: SolverConfig::default(),
            monotone_slack: 1e-3,
        }
    }
}

/// Computes both sides of the min-max certificate without asserting.
pub fn minmax_report(bounds: &BoundFields, grid: &Grid, spec: &MinMaxSpec) -> Result<MinMaxReport> {
    let star = principal_eig_pucci(bounds, grid, &spec.solver)?;
    let fine_grid = grid.with_nodes(2 * grid.len())?;
    let fine = principal_eig_pucci(bounds, &fine_grid, &spec.solver)?;
    let eps_grid = (star.lambda - fine.lambda).abs();
    let budget = 2.0 * eps_grid + spec.solver.tol * star.lambda.abs();

    let samples = (0..spec.n_samples)
        .into_par_iter()
        .map(|i| {
            let s = seed::derive(spec.seed, seed::TAG_SAMPLER, i as u64);
            let c = sample_covariance(bounds, grid, spec.family, s)?;
            let pair = principal_eig_linear(&c, grid, &spec.solver)?;
            Ok(SampleRecord {
                seed: s,
                family: spec.family.resolve(s).name().to_string(),
                lambda: pair.lambda,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lambda_min_sampled = samples.iter().map(|s| s.lambda).fold(f64::INFINITY, f64::min);

    let mut m_list = spec.m_list.clone();
    m_list.sort_unstable();
    m_list.dedup();
    let selection = m_list
        .par_iter()
        .map(|&m| {
            let sel = construct_selection(&star, bounds, grid, m)?;
            let pair = principal_eig_linear(&sel.c_m_smooth, grid, &spec.solver)?;
            Ok(SelectionRecord {
                m,
                lambda: pair.lambda,
                gap: pair.lambda - star.lambda,
                defect: sel.sup_defect,
                kappa: sel.kappa,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fitted_c = selection
        .iter()
        .map(|s| s.m as f64 * (s.gap - eps_grid).max(0.0))
        .fold(0.0, f64::max);

    let mut verdicts = Vec::new();
    if !samples.is_empty() {
        let worst = lambda_min_sampled - star.lambda;
        verdicts.push(Verdict::new(
            "dominance",
            worst >= -budget,
            format!("min sampled λ^c - λ* = {worst:.3e}, budget {budget:.3e}"),
        ));
    }
    for s in &selection {
        let bound = 3.0 / s.m as f64 + eps_grid;
        verdicts.push(Verdict::new(
            &format!("selection_bound_m{}", s.m),
            s.gap <= bound && s.gap >= -budget,
            format!("gap {:.3e} in [-{budget:.3e}, {bound:.3e}]", s.gap),
        ));
    }
    if selection.len() > 1 {
        let ok = selection.windows(2).all(|w| w[1].gap <= w[0].gap + spec.monotone_slack);
        verdicts.push(Verdict::new(
            "selection_monotone",
            ok,
            format!(
                "gaps {:?} nonincreasing within {}",
                selection.iter().map(|s| s.gap).collect::<Vec<_>>(),
                spec.monotone_slack
            ),
        ));
    }

    Ok(MinMaxReport {
        lambda_star: star.lambda,
        lambda_star_fine: fine.lambda,
        eps_grid,
        tolerance_budget: budget,
        samples,
        lambda_min_sampled,
        selection,
        fitted_c,
        verdicts,
    })
}

/// Builds the min-max report and fails on any violated identity.
pub fn verify_minmax(bounds: &BoundFields, grid: &Grid, spec: &MinMaxSpec) -> Result<MinMaxReport> {
    let report = minmax_report(bounds, grid, spec)?;
    report.check()?;
    Ok(report)
}

/// Resolution used for each exhaustion member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridPolicy {
    /// Same number of interior nodes on every member.
    Nodes(usize),
    /// Same spacing on every member (node count rounded).
    Spacing(f64),
}

impl GridPolicy {
    fn grid_for(&self, domain: &Domain) -> Result<Grid> {
        match *self {
            GridPolicy::Nodes(n) => Grid::new(domain.clone(), n),
            GridPolicy::Spacing(h) => {
                if !(h > 0.0) {
                    return Err(Error::input("grid spacing must be positive"));
                }
                let n = (domain.extent() / h).round() as usize;
                let n = if matches!(domain, Domain::Interval { .. }) {
                    n.saturating_sub(1)
                } else {
                    n
                };
                Grid::new(domain.clone(), n.max(crate::domain::MIN_GRID_NODES))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustionReport {
    pub n: Vec<usize>,
    pub extents: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub nonincreasing: bool,
    pub strictly_decreasing: bool,
    pub known_limit: Option<f64>,
    /// `λ*(E_{n_max}) - limit`, when the limit is known.
    pub final_gap: Option<f64>,
}

pub const EXHAUSTION_MONOTONE_TOL: f64 = 1e-6;

/// `λ*(E_n)` along an exhaustion of `parent`; fails if the sequence increases
/// by more than `1e-6`, or if it undershoots a known limit by more than that.
pub fn exhaustion_limit(
    parent: &Region,
    bounds: &BoundFields,
    n_max: usize,
    policy: GridPolicy,
    rule: ShrinkRule,
    solver: &SolverConfig,
    known_limit: Option<f64>,
) -> Result<ExhaustionReport> {
    let family = build_exhaustion(parent, n_max, rule)?;
    let lambdas = family
        .members
        .par_iter()
        .map(|d| {
            let grid = policy.grid_for(d)?;
            Ok(principal_eig_pucci(bounds, &grid, solver)?.lambda)
        })
        .collect::<Result<Vec<f64>>>()?;
    let nonincreasing = lambdas.windows(2).all(|w| w[1] <= w[0] + EXHAUSTION_MONOTONE_TOL);
    let strictly_decreasing = lambdas.windows(2).all(|w| w[1] < w[0]);
    if !nonincreasing {
        return Err(Error::IdentityViolation(format!(
            "exhaustion eigenvalues increase: {lambdas:?}"
        )));
    }
    let final_gap = known_limit.map(|l| lambdas.last().expect("n_max >= 1") - l);
    if let (Some(limit), Some(&last)) = (known_limit, lambdas.last()) {
        if last < limit - EXHAUSTION_MONOTONE_TOL {
            return Err(Error::IdentityViolation(format!(
                "λ*(E_n) = {last} fell below the limit {limit}"
            )));
        }
    }
    Ok(ExhaustionReport {
        n: (1..=n_max).collect(),
        extents: family.members.iter().map(Domain::extent).collect(),
        lambdas,
        nonincreasing,
        strictly_decreasing,
        known_limit,
        final_gap,
    })
}
