//! `λ*(D) = inf_c λ*,c(D)`: sampled admissible fields never beat the Pucci
//! eigenvalue, and the selection sequence `c_m` approaches it.
//!
//! ```bash
//! cargo run --release --example minmax_identity
//! ```

use std::f64::consts::PI;

use pucci_lab::domain::{Domain, Grid};
use pucci_lab::fields::constant_bounds;
use pucci_lab::robust::{minmax_report, MinMaxSpec};

fn main() -> pucci_lab::Result<()> {
    let domain = Domain::interval(0.0, PI)?;
    let grid = Grid::new(domain.clone(), 1000)?;
    let bounds = constant_bounds(2.0, 8.0, &domain)?;
    let spec = MinMaxSpec {
        n_samples: 40,
        seed: 5,
        ..MinMaxSpec::default()
    };
    let report = minmax_report(&bounds, &grid, &spec)?;

    println!("λ*(D) = {:.8}   ε_grid = {:.2e}", report.lambda_star, report.eps_grid);
    println!(
        "min over {} sampled c: {:.8}",
        report.samples.len(),
        report.lambda_min_sampled
    );
    println!("   m    λ*,c_m      gap       3/m");
    for s in &report.selection {
        println!("{:4}  {:.8}  {:.2e}  {:.3}", s.m, s.lambda, s.gap, 3.0 / s.m as f64);
    }
    for v in &report.verdicts {
        println!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    Ok(())
}
