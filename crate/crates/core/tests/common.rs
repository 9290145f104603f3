#![allow(dead_code)]

use pucci_lab::domain::{Domain, Grid};
use pucci_lab::eigen::{principal_eig_pucci, EigenPair, SolverConfig};
use pucci_lab::fields::{constant_bounds, BoundFields};
use std::f64::consts::PI;

pub fn canonical(n: usize) -> (Grid, BoundFields) {
    let d = Domain::interval(0.0, PI).unwrap();
    let b = constant_bounds(2.0, 8.0, &d).unwrap();
    (Grid::new(d, n).unwrap(), b)
}

pub fn canonical_pair(n: usize) -> (Grid, BoundFields, EigenPair) {
    let (g, b) = canonical(n);
    let p = principal_eig_pucci(&b, &g, &SolverConfig::default()).unwrap();
    (g, b, p)
}

pub fn configs_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

/// Radial Pucci eigenvalue on the unit ball by RK4 shooting on
/// `½ (w(η'') η'' + (d-1) θ η'/r) + λ η = 0`, `w(e) = Θ` if `e > 0` else `θ`.
/// `η` is radially decreasing, so the tangential eigenvalue `η'/r` takes `θ`.
pub fn shooting_ball(dim: usize, lo: f64, hi: f64) -> f64 {
    let first_zero = |lambda: f64| -> f64 {
        let k = (dim - 1) as f64;
        let rhs = |r: f64, y: [f64; 2]| -> [f64; 2] {
            let tang = if r > 0.0 {
                y[1] / r
            } else {
                -2.0 * lambda / (dim as f64 * lo)
            };
            let num = -(2.0 * lambda * y[0] + k * lo * tang);
            let w = if num > 0.0 { hi } else { lo };
            [y[1], num / w]
        };
        let h = 1e-5;
        let mut r = 0.0;
        let mut y = [1.0, 0.0];
        while r < 3.0 {
            let k1 = rhs(r, y);
            let k2 = rhs(r + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
            let k3 = rhs(r + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
            let k4 = rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            let next = [
                y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            ];
            if next[0] <= 0.0 {
                return r + h * y[0] / (y[0] - next[0]);
            }
            y = next;
            r += h;
        }
        f64::INFINITY
    };
    let (mut a, mut b) = (0.1, 50.0);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if first_zero(m) > 1.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// First zero of the Bessel function `J_ν` by series summation and bisection.
pub fn bessel_first_zero(nu: f64, lo: f64, hi: f64) -> f64 {
    let j = |x: f64| -> f64 {
        let mut term = (x / 2.0).powf(nu) / gamma(nu + 1.0);
        let mut sum = term;
        for k in 1..80 {
            term *= -(x * x / 4.0) / (k as f64 * (k as f64 + nu));
            sum += term;
        }
        sum
    };
    let (mut a, mut b) = (lo, hi);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if j(a) * j(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

fn gamma(x: f64) -> f64 {
    // only half-integers and integers are needed here
    if (x - x.round()).abs() < 1e-12 {
        (1..x.round() as u64).map(|k| k as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut y = 0.5;
        while y < x - 1e-12 {
            g *= y;
            y += 1.0;
        }
        g
    }
}
