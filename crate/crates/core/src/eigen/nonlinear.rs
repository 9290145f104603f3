use serde::{Deserialize, Serialize};

use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::fields::BoundFields;
use crate::pucci::{optimal_weight, pucci_plus_eigenvalues};

use super::stencil::{assemble, hessian_with_stride, HessianField};
use super::{bubble, inverse_power, EigenPair, SolverConfig};

/// Which envelope value each node uses in each Hessian direction; `true` is `Θ`.
#[derive(Debug, Clone, PartialEq)]
struct Policy {
    radial: Vec<bool>,
    tangential: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub nodes: usize,
    /// Nodes whose radial (on intervals: only) direction uses `Θ`.
    pub radial_upper: usize,
    pub tangential_upper: usize,
    /// Midpoints between neighbouring nodes where the radial choice flips.
    pub radial_switches: Vec<f64>,
    /// Policy-iteration sweeps summed over the outer iterations.
    pub sweeps: usize,
}

impl Policy {
    fn from_hessian(hess: &HessianField) -> Self {
        Self {
            radial: hess.radial.iter().map(|&e| e >= 0.0).collect(),
            tangential: hess.tangential.iter().map(|&e| e >= 0.0).collect(),
        }
    }

    fn coefficients(&self, lo: &[f64], hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let pick = |choice: &[bool]| -> Vec<f64> {
            choice
                .iter()
                .enumerate()
                .map(|(i, &up)| if up { hi[i] } else { lo[i] })
                .collect()
        };
        (pick(&self.radial), pick(&self.tangential))
    }

    /// Howard improvement step. A direction switches only on strict gain, so
    /// zero second differences keep their current choice.
    fn improve(&mut self, hess: &HessianField, lo: &[f64], hi: &[f64]) -> bool {
        let mut changed = false;
        let mut update = |choice: &mut Vec<bool>, values: &[f64]| {
            for (i, (c, &e)) in choice.iter_mut().zip(values).enumerate() {
                let current = if *c { hi[i] } else { lo[i] };
                let best = optimal_weight(e, lo[i], hi[i]);
                if (best - current) * e > 0.0 {
                    *c = best == hi[i];
                    changed = true;
                }
            }
        };
        update(&mut self.radial, &hess.radial);
        if hess.tangential_multiplicity > 0 {
            update(&mut self.tangential, &hess.tangential);
        }
        changed
    }

    fn summary(&self, grid: &Grid, sweeps: usize) -> PolicySummary {
        let nodes = grid.nodes();
        let radial_switches = self
            .radial
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] != w[1])
            .map(|(i, _)| 0.5 * (nodes[i] + nodes[i + 1]))
            .collect();
        PolicySummary {
            nodes: grid.len(),
            radial_upper: self.radial.iter().filter(|&&u| u).count(),
            tangential_upper: if grid.tangential_multiplicity() > 0 {
                self.tangential.iter().filter(|&&u| u).count()
            } else {
                0
            },
            radial_switches,
            sweeps,
        }
    }
}

/// `F(x, D²u)` at every node, with the discrete Hessian.
pub fn apply_f(u: &[f64], bounds: &BoundFields, grid: &Grid) -> Result<Vec<f64>> {
    let hess = super::discrete_hessian(u, grid)?;
    let (lo, hi) = bounds.on_grid(grid);
    Ok((0..grid.len())
        .map(|i| 0.5 * pucci_plus_eigenvalues(&hess.eigenvalues(i), lo[i], hi[i]))
        .collect())
}

struct PucciDirichlet<'a> {
    grid: &'a Grid,
    lo: Vec<f64>,
    hi: Vec<f64>,
    policy: Policy,
    max_sweeps: usize,
    sweeps: usize,
}

impl<'a> PucciDirichlet<'a> {
    fn new(bounds: &BoundFields, grid: &'a Grid, initial: &[f64], max_sweeps: usize) -> Result<Self> {
        bounds.check_grid(grid)?;
        let (lo, hi) = bounds.on_grid(grid);
        let policy = Policy::from_hessian(&hessian_with_stride(initial, grid, 1));
        Ok(Self {
            grid,
            lo,
            hi,
            policy,
            max_sweeps,
            sweeps: 0,
        })
    }

    /// Solves `F(x, D²u) = f` by policy iteration, warm-started from the
    /// current policy.
    fn solve(&mut self, f: &[f64]) -> Result<Vec<f64>> {
        for _ in 0..self.max_sweeps {
            self.sweeps += 1;
            let (a_r, a_t) = self.policy.coefficients(&self.lo, &self.hi);
            let u = assemble(self.grid, &a_r, &a_t).solve(f)?;
            let hess = hessian_with_stride(&u, self.grid, 1);
            if !self.policy.improve(&hess, &self.lo, &self.hi) {
                return Ok(u);
            }
        }
        let s = self.policy.summary(self.grid, self.sweeps);
        Err(Error::Convergence {
            iterations: self.max_sweeps,
            reason: format!(
                "policy iteration did not become stationary; final policy: {} of {} nodes at Θ radially, switches at {:?}",
                s.radial_upper, s.nodes, s.radial_switches
            ),
            last: None,
        })
    }
}

/// Solves the Dirichlet problem `F(x, D²u) = f`, `u = 0` on the boundary.
pub fn solve_pucci_dirichlet(bounds: &BoundFields, f: &[f64], grid: &Grid, cfg: &SolverConfig) -> Result<Vec<f64>> {
    if f.len() != grid.len() {
        return Err(Error::input("right-hand side does not match the grid"));
    }
    let mut p = PucciDirichlet::new(bounds, grid, &bubble(grid), cfg.max_policy_iterations)?;
    p.solve(f)
}

/// `λ*(D) = λ⁺(D)` for `F` and its positive eigenfunction with `η(x₀) = 1`.
pub fn principal_eig_pucci(bounds: &BoundFields, grid: &Grid, cfg: &SolverConfig) -> Result<EigenPair> {
    principal_eig_pucci_from(bounds, grid, cfg, bubble(grid))
}

/// Same as [`principal_eig_pucci`], starting inverse iteration from `initial`
/// (interior nodal values; must be positive).
pub fn principal_eig_pucci_from(
    bounds: &BoundFields,
    grid: &Grid,
    cfg: &SolverConfig,
    initial: Vec<f64>,
) -> Result<EigenPair> {
    cfg.validate()?;
    let mut inner = PucciDirichlet::new(bounds, grid, &initial, cfg.max_policy_iterations)?;
    let (lo, hi) = (inner.lo.clone(), inner.hi.clone());
    let out = {
        let solve = |rhs: &[f64]| inner.solve(rhs);
        inverse_power(grid, cfg, initial, solve, |eta, lambda| {
            let hess = hessian_with_stride(eta, grid, 1);
            Ok((0..grid.len())
                .map(|i| {
                    let f = 0.5 * pucci_plus_eigenvalues(&hess.eigenvalues(i), lo[i], hi[i]);
                    (f + lambda * eta[i]).abs()
                })
                .fold(0.0, f64::max))
        })?
    };
    let policy = inner.policy.summary(grid, inner.sweeps);
    Ok(EigenPair {
        lambda: out.lambda,
        residual: out.residual,
        iterations: out.iterations,
        n: grid.len(),
        x0: cfg.normalization_point(grid)?,
        policy: Some(policy),
        eta: out.eta,
    })
}
