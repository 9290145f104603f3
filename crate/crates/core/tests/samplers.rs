mod common;

use pucci_lab::domain::{Domain, Grid};
use pucci_lab::fields::{
    constant_bounds, sample_covariance, validate_covariance, BoundFields, SamplerSpec, ScalarField,
};

fn families() -> [SamplerSpec; 4] {
    [
        SamplerSpec::Constant,
        SamplerSpec::Fourier {
            modes: 6,
            amplitude: 2.0,
        },
        SamplerSpec::Mollified { pieces: 8, width: 0.04 },
        SamplerSpec::Mixed,
    ]
}

fn check_inside(bounds: &BoundFields, grid: &Grid, family: SamplerSpec) {
    let (lo, hi) = bounds.on_grid(grid);
    for seed in 0..100 {
        let c = sample_covariance(bounds, grid, family, seed).unwrap();
        let f = c.frame(grid).unwrap();
        for i in 0..grid.len() {
            for v in [f.radial[i], f.tangential[i]] {
                assert!(
                    v >= lo[i] - 1e-12 && v <= hi[i] + 1e-12,
                    "{family:?} seed {seed} node {i}: {v}"
                );
            }
        }
        assert!(validate_covariance(&c, bounds, grid).is_ok());
    }
}

#[test]
fn samples_are_admissible_on_interval() {
    let (g, b) = common::canonical(300);
    for f in families() {
        check_inside(&b, &g, f);
    }
}

#[test]
fn samples_are_admissible_with_varying_envelope() {
    let d = Domain::unit_ball(2).unwrap();
    let g = Grid::new(d.clone(), 200).unwrap();
    let lo = ScalarField::on_grid(&g, g.nodes().iter().map(|r| 1.0 + r).collect()).unwrap();
    let hi = ScalarField::on_grid(&g, g.nodes().iter().map(|r| 2.5 + r * r).collect()).unwrap();
    let b = BoundFields::new(lo, hi, d).unwrap();
    for f in families() {
        check_inside(&b, &g, f);
    }
}

#[test]
fn samples_are_deterministic_in_seed() {
    let d = Domain::interval(0.0, 1.0).unwrap();
    let g = Grid::new(d.clone(), 100).unwrap();
    let b = constant_bounds(1.0, 4.0, &d).unwrap();
    for f in families() {
        let a = sample_covariance(&b, &g, f, 17).unwrap();
        let c = sample_covariance(&b, &g, f, 17).unwrap();
        assert_eq!(a.frame(&g).unwrap().radial, c.frame(&g).unwrap().radial);
    }
}
