//! Simulates the state under the worst-case covariance with the optimal
//! drift and compares `V*_t` with `e^{λ* t} η*(X_t)` along each path.
//!
//! ```bash
//! cargo run --release --example wealth_bound
//! ```

use std::f64::consts::PI;

use pucci_lab::domain::{Domain, Grid};
use pucci_lab::eigen::{principal_eig_linear, principal_eig_pucci, SolverConfig};
use pucci_lab::fields::{constant_bounds, CovarianceField};
use pucci_lab::sim::{bound_ensemble, simulate_x, wealth_path, Drift, PathConfig, StrategySpec};

fn main() -> pucci_lab::Result<()> {
    let domain = Domain::interval(0.0, PI)?;
    let grid = Grid::new(domain.clone(), 2000)?;
    let bounds = constant_bounds(2.0, 8.0, &domain)?;
    let solver = SolverConfig::default();
    let star = principal_eig_pucci(&bounds, &grid, &solver)?;
    let c = CovarianceField::constant(2.0, &grid);
    let reference = principal_eig_linear(&c, &grid, &solver)?;

    let cfg = PathConfig {
        horizon: 10.0,
        seed: 42,
        ..PathConfig::default()
    };
    let path = simulate_x(&c, Drift::Optimal(&reference), &cfg, &grid, 0)?;
    let path = wealth_path(&path, star.lambda, &star, &grid, &StrategySpec::PiStar)?;
    println!("    t        X_t       V*_t    e^(λt) η(X_t)");
    for k in (0..path.len()).step_by(path.len() / 10) {
        println!(
            "{:6.2}  {:9.5}  {:10.4e}  {:10.4e}",
            path.times[k],
            path.state(k)[0],
            path.wealth[k],
            path.comparison[k]
        );
    }

    let (summary, _) = bound_ensemble(&c, &reference, &star, &grid, &cfg, 50, 0.5, 0)?;
    println!(
        "50 paths: worst ratio {:.4}, worst scaled defect {:.3e}, ruined {}, mean growth {:.4}",
        summary.worst_ratio, summary.worst_scaled_defect, summary.ruined, summary.mean_growth
    );
    Ok(())
}
