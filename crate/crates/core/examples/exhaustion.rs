//! Eigenvalues on an increasing family of intervals decrease to the
//! eigenvalue of the parent, and the same on the half-line `(0, ∞)`.
//!
//! ```bash
//! cargo run --release --example exhaustion
//! ```

use std::f64::consts::PI;

use pucci_lab::domain::{Domain, Region, ShrinkRule};
use pucci_lab::eigen::SolverConfig;
use pucci_lab::fields::BoundFields;
use pucci_lab::robust::{exhaustion_limit, GridPolicy};

fn main() -> pucci_lab::Result<()> {
    let solver = SolverConfig::default();
    let parent = Region::Bounded {
        domain: Domain::interval(0.0, PI)?,
    };
    let bounds = BoundFields::constant(2.0, 8.0, parent.clone())?;
    let report = exhaustion_limit(
        &parent,
        &bounds,
        12,
        GridPolicy::Nodes(2000),
        ShrinkRule::default(),
        &solver,
        Some(1.0),
    )?;
    println!("E_n ↑ (0, π), λ*(E) = 1");
    for ((n, ext), l) in report.n.iter().zip(&report.extents).zip(&report.lambdas) {
        println!("  n = {n:2}  |E_n| = {ext:.5}  λ = {l:.6}");
    }
    println!("strictly decreasing: {}", report.strictly_decreasing);

    let half = Region::HalfLine { a: 0.0 };
    let bounds = BoundFields::constant(1.0, 2.0, half.clone())?;
    let report = exhaustion_limit(
        &half,
        &bounds,
        8,
        GridPolicy::Spacing(0.01),
        ShrinkRule::default(),
        &solver,
        Some(0.0),
    )?;
    println!("E_n ↑ (0, ∞), λ*(E) = 0");
    for (n, l) in report.n.iter().zip(&report.lambdas) {
        println!("  n = {n:2}  λ = {l:.6}");
    }
    Ok(())
}
