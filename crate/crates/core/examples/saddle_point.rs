//! Growth rates of `π*` against constant-proportion strategies under the
//! extreme and sampled covariance scenarios (reduced horizon).
//!
//! ```bash
//! cargo run --release --example saddle_point
//! ```

use std::f64::consts::PI;

use pucci_lab::domain::{Domain, Grid};
use pucci_lab::fields::constant_bounds;
use pucci_lab::sim::{minmax_experiment, PathConfig, SaddleConfig};

fn main() -> pucci_lab::Result<()> {
    let domain = Domain::interval(0.0, PI)?;
    let grid = Grid::new(domain.clone(), 1000)?;
    let bounds = constant_bounds(2.0, 8.0, &domain)?;
    let cfg = SaddleConfig {
        path: PathConfig {
            horizon: 50.0,
            seed: 3,
            ..PathConfig::default()
        },
        n_paths: 40,
        n_sampled: 2,
        ..SaddleConfig::default()
    };
    let report = minmax_experiment(&bounds, &grid, &cfg)?;
    println!(
        "{:12} {:26} {:>9} {:>8} {:>7}",
        "scenario", "strategy", "mean", "sd", "ruined"
    );
    for c in &report.cells {
        println!(
            "{:12} {:26} {:9.4} {:8.4} {:7}",
            c.scenario, c.strategy, c.mean_rate, c.sd, c.ruined_count
        );
    }
    for v in &report.verdicts {
        println!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    Ok(())
}
