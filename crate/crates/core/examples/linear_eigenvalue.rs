//! Dirichlet eigenvalue of `½ Tr(c D²)` against classical closed forms.
//!
//! ```bash
//! cargo run --release --example linear_eigenvalue
//! ```

use std::f64::consts::PI;

use pucci_lab::domain::{Domain, Grid};
use pucci_lab::eigen::{principal_eig_linear, SolverConfig};
use pucci_lab::fields::CovarianceField;

fn main() -> pucci_lab::Result<()> {
    let solver = SolverConfig::default();
    let cases = [
        ("(0, π), c = 2", Domain::interval(0.0, PI)?, 2.0, 1.0),
        ("(0, π/2), c = 2", Domain::interval(0.0, PI / 2.0)?, 2.0, 4.0),
        // j0 = 2.404825557695773, first zero of the Bessel function J0
        (
            "unit disc, c = 1",
            Domain::unit_ball(2)?,
            1.0,
            2.404825557695773f64.powi(2) / 2.0,
        ),
    ];
    for (label, domain, c, exact) in cases {
        let grid = Grid::new(domain, 2000)?;
        let pair = principal_eig_linear(&CovarianceField::constant(c, &grid), &grid, &solver)?;
        println!(
            "{label:18} λ = {:.8}  exact {exact:.8}  rel err {:.2e}",
            pair.lambda,
            (pair.lambda - exact).abs() / exact
        );
    }
    Ok(())
}
