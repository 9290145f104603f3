//! Principal eigenpairs of `L^c` and of the nonlinear operator `F`.
//!
//! Both problems are solved by inverse power iteration normalized at a point
//! `x₀`: `u_{k+1}` solves the Dirichlet problem with right-hand side `-u_k`,
//! and `λ_k = u_k(x₀) / u_{k+1}(x₀)`. For `F` the inner Dirichlet problem is
//! resolved by Howard policy iteration over the per-direction coefficient
//! choice `{θ(x), Θ(x)}`.

mod harnack;
mod linear;
mod nonlinear;
mod stencil;

pub use harnack::{harnack_ratio, HarnackReport};
pub use linear::{principal_eig_linear, principal_eig_linear_from, solve_linear_dirichlet};
pub use nonlinear::{apply_f, principal_eig_pucci, principal_eig_pucci_from, solve_pucci_dirichlet, PolicySummary};
pub use stencil::{discrete_hessian, HessianField};

pub(crate) use stencil::hessian_with_stride;

use serde::{Deserialize, Serialize};

use crate::domain::{Grid, MIN_GRID_NODES};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Relative tolerance on successive eigenvalue estimates.
    pub tol: f64,
    /// Residual tolerance, relative to `λ ‖η‖_max`.
    pub residual_tol: f64,
    /// Cap on policy-iteration sweeps per inner solve.
    pub max_policy_iterations: usize,
    pub max_iterations: usize,
    /// Normalization point as a reduced coordinate; `None` means the center.
    pub x0: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            residual_tol: 1e-8,
            max_policy_iterations: 100,
            max_iterations: 500,
            x0: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.residual_tol > 0.0) {
            return Err(Error::input("solver tolerances must be positive"));
        }
        if self.max_iterations == 0 || self.max_policy_iterations == 0 {
            return Err(Error::input("iteration caps must be positive"));
        }
        Ok(())
    }

    pub(crate) fn normalization_point(&self, grid: &Grid) -> Result<f64> {
        let x0 = self.x0.unwrap_or_else(|| grid.domain().center_coordinate());
        let (lo, hi) = grid.domain().coordinate_range();
        let inside = if grid.is_ball() {
            (0.0..hi).contains(&x0)
        } else {
            lo < x0 && x0 < hi
        };
        if !inside {
            return Err(Error::input(format!("normalization point {x0} is not interior")));
        }
        Ok(x0)
    }
}

/// Principal eigenpair on a grid. `eta` holds interior nodal values; the
/// boundary values are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Normalization coordinate, `η(x0) = 1`.
    pub x0: f64,
    pub policy: Option<PolicySummary>,
    pub eta: Vec<f64>,
}

impl EigenPair {
    /// `η` at a reduced coordinate by piecewise-linear interpolation.
    pub fn eta_at(&self, grid: &Grid, s: f64) -> Option<f64> {
        grid.interpolate(&self.eta, s)
    }

    pub fn max_eta(&self) -> f64 {
        self.eta.iter().copied().fold(0.0, f64::max)
    }
}

/// The bubble `x ↦ dist(x, ∂D)`.
pub fn bubble(grid: &Grid) -> Vec<f64> {
    let (lo, hi) = grid.domain().coordinate_range();
    grid.nodes()
        .iter()
        .map(|&s| if grid.is_ball() { hi - s } else { (s - lo).min(hi - s) })
        .collect()
}

pub(crate) struct PowerOutcome {
    pub lambda: f64,
    pub eta: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Inverse power iteration. `solve(f)` returns `u` with `A u = f` for the
/// (possibly nonlinear, positively homogeneous) operator `A`; `residual(η, λ)`
/// returns `max |A η + λ η|`.
pub(crate) fn inverse_power(
    grid: &Grid,
    cfg: &SolverConfig,
    initial: Vec<f64>,
    mut solve: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    mut residual: impl FnMut(&[f64], f64) -> Result<f64>,
) -> Result<PowerOutcome> {
    cfg.validate()?;
    if grid.len() < MIN_GRID_NODES {
        return Err(Error::input("grid too small"));
    }
    if initial.len() != grid.len() || initial.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::input("initial vector must be positive on every node"));
    }
    let x0 = cfg.normalization_point(grid)?;
    let value_at = |u: &[f64]| grid.interpolate(u, x0).expect("x0 is interior");

    let scale = value_at(&initial);
    let mut u: Vec<f64> = initial.iter().map(|v| v / scale).collect();
    let mut lambda_prev = f64::NAN;
    let mut last_residual = f64::INFINITY;
    for k in 1..=cfg.max_iterations {
        let rhs: Vec<f64> = u.iter().map(|v| -v).collect();
        let v = solve(&rhs)?;
        let v0 = value_at(&v);
        if !(v0 > 0.0 && v0.is_finite()) {
            return Err(Error::Convergence {
                iterations: k,
                reason: format!("iterate lost positivity at x0 (value {v0})"),
                last: None,
            });
        }
        let lambda = 1.0 / v0;
        u = v.iter().map(|x| x / v0).collect();
        let increment = (lambda - lambda_prev).abs();
        if increment <= cfg.tol * lambda.abs() {
            last_residual = residual(&u, lambda)?;
            let eta_max = u.iter().copied().fold(0.0, f64::max);
            if last_residual <= cfg.residual_tol * lambda.abs() * eta_max {
                if let Some(i) = u.iter().position(|&x| !(x > 0.0)) {
                    return Err(Error::Convergence {
                        iterations: k,
                        reason: format!("converged iterate is not positive at node {i}"),
                        last: None,
                    });
                }
                return Ok(PowerOutcome {
                    lambda,
                    eta: u,
                    residual: last_residual,
                    iterations: k,
                });
            }
        }
        lambda_prev = lambda;
    }
    Err(Error::Convergence {
        iterations: cfg.max_iterations,
        reason: format!("eigenvalue not converged (last residual {last_residual:e}, λ ≈ {lambda_prev})"),
        last: Some(Box::new(EigenPair {
            lambda: lambda_prev,
            residual: last_residual,
            iterations: cfg.max_iterations,
            n: grid.len(),
            x0,
            policy: None,
            eta: u,
        })),
    })
}
