//! The near-optimal admissible field `c_m` for a varying envelope, written
//! as plot-ready CSV on stdout.
//!
//! ```bash
//! cargo run --release --example selection_field > selection.csv
//! ```

use std::f64::consts::PI;

use pucci_lab::domain::{Domain, Grid};
use pucci_lab::eigen::{principal_eig_linear, principal_eig_pucci, SolverConfig};
use pucci_lab::fields::{BoundFields, ScalarField};
use pucci_lab::robust::construct_selection;

fn main() -> pucci_lab::Result<()> {
    let domain = Domain::interval(0.0, PI)?;
    let grid = Grid::new(domain.clone(), 800)?;
    let theta = ScalarField::on_grid(
        &grid,
        grid.nodes().iter().map(|s| 2.0 + 0.5 * (2.0 * s).cos()).collect(),
    )?;
    let upper = ScalarField::on_grid(&grid, grid.nodes().iter().map(|s| 6.0 + s).collect())?;
    let bounds = BoundFields::new(theta, upper, domain)?;
    let solver = SolverConfig::default();
    let star = principal_eig_pucci(&bounds, &grid, &solver)?;
    eprintln!("λ* = {:.8}", star.lambda);

    let sel = construct_selection(&star, &bounds, &grid, 20)?;
    let linear = principal_eig_linear(&sel.c_m_smooth, &grid, &solver)?;
    eprintln!(
        "m = 20: κ = {:.3e}, sup defect {:.3e}, λ*,c_m - λ* = {:.3e}",
        sel.kappa,
        sel.sup_defect,
        linear.lambda - star.lambda
    );

    let frame = sel.c_m_smooth.frame(&grid)?;
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(["s", "theta", "Theta", "c_m", "eta"])?;
    let (lo, hi) = bounds.on_grid(&grid);
    for i in 0..grid.len() {
        w.write_record([grid.nodes()[i], lo[i], hi[i], frame.radial[i], star.eta[i]].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
