mod common;

use std::f64::consts::PI;

use common::{bessel_first_zero, shooting_ball};
use pucci_lab::domain::{Domain, Grid};
use pucci_lab::eigen::{principal_eig_linear, principal_eig_pucci, SolverConfig};
use pucci_lab::fields::{constant_bounds, BoundFields, CovarianceField, ScalarField};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn bessel_oracle_matches_tabulated_zeros() {
    assert!((bessel_first_zero(0.0, 2.0, 3.0) - 2.404825557695773).abs() < 1e-12);
    assert!((bessel_first_zero(0.5, 3.0, 3.5) - PI).abs() < 1e-12);
}

#[test]
fn interval_closed_forms() {
    let s = SolverConfig::default();
    for (b, c, exact) in [(PI, 2.0, 1.0), (PI / 2.0, 2.0, 4.0), (1.0, 1.0, PI * PI / 2.0)] {
        let g = Grid::new(Domain::interval(0.0, b).unwrap(), 2000).unwrap();
        let p = principal_eig_linear(&CovarianceField::constant(c, &g), &g, &s).unwrap();
        assert!(rel(p.lambda, exact) < 1e-3, "{} vs {exact}", p.lambda);
    }
}

#[test]
fn ball_linear_matches_bessel() {
    let s = SolverConfig::default();
    for (dim, nu, bracket) in [(2usize, 0.0, (2.0, 3.0)), (3, 0.5, (3.0, 3.5))] {
        let g = Grid::new(Domain::unit_ball(dim).unwrap(), 1000).unwrap();
        let p = principal_eig_linear(&CovarianceField::constant(1.0, &g), &g, &s).unwrap();
        let j = bessel_first_zero(nu, bracket.0, bracket.1);
        assert!(
            rel(p.lambda, j * j / 2.0) < 1e-3,
            "d={dim}: {} vs {}",
            p.lambda,
            j * j / 2.0
        );
    }
}

#[test]
fn ball_pucci_matches_shooting() {
    let s = SolverConfig::default();
    for dim in [2usize, 3] {
        let d = Domain::unit_ball(dim).unwrap();
        let b = constant_bounds(1.0, 2.0, &d).unwrap();
        let g = Grid::new(d, 2000).unwrap();
        let p = principal_eig_pucci(&b, &g, &s).unwrap();
        let exact = shooting_ball(dim, 1.0, 2.0);
        assert!(rel(p.lambda, exact) < 1e-3, "d={dim}: {} vs {exact}", p.lambda);
    }
}

#[test]
fn pucci_below_every_constant_coefficient() {
    let s = SolverConfig::default();
    let d = Domain::unit_ball(2).unwrap();
    let g = Grid::new(d.clone(), 800).unwrap();
    let b = constant_bounds(1.0, 2.0, &d).unwrap();
    let star = principal_eig_pucci(&b, &g, &s).unwrap().lambda;
    for c in [1.0, 1.25, 1.5, 2.0] {
        let l = principal_eig_linear(&CovarianceField::constant(c, &g), &g, &s)
            .unwrap()
            .lambda;
        assert!(star < l, "c = {c}: {star} vs {l}");
    }
}

#[test]
fn degenerate_envelope_reduces_to_linear() {
    let s = SolverConfig::default();
    let d = Domain::interval(0.0, PI).unwrap();
    let g = Grid::new(d.clone(), 1000).unwrap();
    let vals: Vec<f64> = g.nodes().iter().map(|x| 1.5 + 0.5 * x.sin()).collect();
    let f = ScalarField::on_grid(&g, vals.clone()).unwrap();
    let b = BoundFields::degenerate(f.clone(), f, d).unwrap();
    let star = principal_eig_pucci(&b, &g, &s).unwrap().lambda;
    let lin = principal_eig_linear(&CovarianceField::Scalar(vals), &g, &s)
        .unwrap()
        .lambda;
    assert!((star - lin).abs() < 1e-9, "{star} vs {lin}");
}

#[test]
fn grid_refinement_is_second_order() {
    let s = SolverConfig::default();
    let (_, b) = common::canonical(16);
    let lambdas: Vec<f64> = [250, 500, 1000, 2000]
        .iter()
        .map(|&n| {
            let g = Grid::new(Domain::interval(0.0, PI).unwrap(), n).unwrap();
            principal_eig_pucci(&b, &g, &s).unwrap().lambda
        })
        .collect();
    for w in lambdas.windows(3) {
        let ratio = (w[0] - w[1]).abs() / (w[1] - w[2]).abs();
        assert!(ratio > 3.0, "{ratio}");
    }
}
