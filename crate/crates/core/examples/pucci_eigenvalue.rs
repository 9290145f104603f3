//! Principal eigenvalue of `F = ½ M⁺_{θ,Θ}` by inverse iteration with
//! policy iteration, plus a grid refinement table.
//!
//! ```bash
//! cargo run --release --example pucci_eigenvalue
//! ```

use std::f64::consts::PI;

use pucci_lab::domain::{Domain, Grid};
use pucci_lab::eigen::{principal_eig_pucci, SolverConfig};
use pucci_lab::fields::{constant_bounds, BoundFields, ScalarField};

fn main() -> pucci_lab::Result<()> {
    let solver = SolverConfig::default();
    let interval = Domain::interval(0.0, PI)?;
    let bounds = constant_bounds(2.0, 8.0, &interval)?;

    println!("constant envelope θ = 2, Θ = 8 on (0, π)");
    let mut prev: Option<f64> = None;
    let mut prev_diff: Option<f64> = None;
    for n in [250, 500, 1000, 2000] {
        let grid = Grid::new(interval.clone(), n)?;
        let pair = principal_eig_pucci(&bounds, &grid, &solver)?;
        let policy = pair.policy.as_ref().map(|p| p.radial_upper).unwrap_or(0);
        let diff = prev.map(|p| (pair.lambda - p).abs());
        let ratio = match (prev_diff, diff) {
            (Some(a), Some(b)) => format!("{:.2}", a / b),
            _ => "-".into(),
        };
        println!(
            "  N = {n:5}  λ = {:.10}  Θ-nodes {policy}  diff ratio {ratio}",
            pair.lambda
        );
        prev_diff = diff;
        prev = Some(pair.lambda);
    }

    // Spatially varying envelope on the unit disc.
    let disc = Domain::unit_ball(2)?;
    let grid = Grid::new(disc.clone(), 1000)?;
    let theta = ScalarField::on_grid(&grid, grid.nodes().iter().map(|r| 1.0 + 0.5 * r).collect())?;
    let upper = ScalarField::on_grid(&grid, vec![3.0; grid.len()])?;
    let bounds = BoundFields::new(theta, upper, disc)?;
    let pair = principal_eig_pucci(&bounds, &grid, &solver)?;
    println!("unit disc, θ(x) = 1 + |x|/2, Θ = 3: λ* = {:.8}", pair.lambda);
    if let Some(p) = &pair.policy {
        println!(
            "  radial Θ-nodes {} / {}, tangential {} / {}",
            p.radial_upper, p.nodes, p.tangential_upper, p.nodes
        );
    }
    Ok(())
}
