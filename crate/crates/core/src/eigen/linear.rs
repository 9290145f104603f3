use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::fields::CovarianceField;

use super::stencil::assemble;
use super::{bubble, inverse_power, EigenPair, SolverConfig};

/// Solves `L^c u = f` with zero boundary values, where on an interval
/// `L^c u = ½ c u''` and on a ball `L^c u = ½ (c_r u'' + (d-1) c_t u'/r)`.
pub fn solve_linear_dirichlet(c: &CovarianceField, f: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    if f.len() != grid.len() {
        return Err(Error::input("right-hand side does not match the grid"));
    }
    let frame = c.frame(grid)?;
    if let Some(i) = frame
        .radial
        .iter()
        .chain(&frame.tangential)
        .position(|&v| !(v > 0.0 && v.is_finite()))
    {
        return Err(Error::Internal(format!(
            "covariance is not positive at node {}",
            i % grid.len()
        )));
    }
    let op = assemble(grid, &frame.radial, &frame.tangential);
    let u = op.solve(f)?;
    let residual = op
        .apply(&u)
        .iter()
        .zip(f)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let f_norm = f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let u_norm = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    // backward error of the elimination, in units of the operator scale
    if residual > 1e-12 * (f_norm + op.norm() * u_norm) {
        return Err(Error::Internal(format!(
            "tridiagonal solve residual {residual:e} too large"
        )));
    }
    Ok(u)
}

/// `λ^{*,c}(D)` and its eigenfunction, normalized so `η(x₀) = 1`.
pub fn principal_eig_linear(c: &CovarianceField, grid: &Grid, cfg: &SolverConfig) -> Result<EigenPair> {
    principal_eig_linear_from(c, grid, cfg, bubble(grid))
}

/// Same as [`principal_eig_linear`], starting from `initial`.
pub fn principal_eig_linear_from(
    c: &CovarianceField,
    grid: &Grid,
    cfg: &SolverConfig,
    initial: Vec<f64>,
) -> Result<EigenPair> {
    let frame = c.frame(grid)?;
    if frame
        .radial
        .iter()
        .chain(&frame.tangential)
        .any(|&v| !(v > 0.0 && v.is_finite()))
    {
        return Err(Error::input("covariance must be positive at every node"));
    }
    let op = assemble(grid, &frame.radial, &frame.tangential);
    let out = inverse_power(
        grid,
        cfg,
        initial,
        |rhs| op.solve(rhs),
        |eta, lambda| {
            Ok(op
                .apply(eta)
                .iter()
                .zip(eta)
                .map(|(l, e)| (l + lambda * e).abs())
                .fold(0.0, f64::max))
        },
    )?;
    Ok(EigenPair {
        lambda: out.lambda,
        residual: out.residual,
        iterations: out.iterations,
        n: grid.len(),
        x0: cfg.normalization_point(grid)?,
        policy: None,
        eta: out.eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use std::f64::consts::PI;

    fn interval(a: f64, b: f64, n: usize) -> Grid {
        Grid::new(Domain::interval(a, b).unwrap(), n).unwrap()
    }

    #[test]
    fn quadratic_solution_is_exact() {
        let g = interval(0.0, PI, 2000);
        let c = CovarianceField::constant(2.0, &g);
        let u = solve_linear_dirichlet(&c, &vec![-2.0; g.len()], &g).unwrap();
        let err = g
            .nodes()
            .iter()
            .zip(&u)
            .map(|(x, v)| (v - x * (PI - x)).abs())
            .fold(0.0, f64::max);
        // ½·2·u'' = -2 ⇒ u'' = -2 ⇒ u = x(π - x)
        assert!(err < 1e-8, "err = {err}");
    }

    #[test]
    fn zero_data_gives_zero() {
        let g = interval(0.0, 1.0, 50);
        let c = CovarianceField::constant(1.3, &g);
        let u = solve_linear_dirichlet(&c, &vec![0.0; 50], &g).unwrap();
        assert!(u.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sine_forcing() {
        let g = interval(0.0, PI, 2000);
        let c = CovarianceField::constant(1.0, &g);
        let f: Vec<f64> = g.nodes().iter().map(|x| -x.sin()).collect();
        let u = solve_linear_dirichlet(&c, &f, &g).unwrap();
        let h = g.spacing();
        let err = g
            .nodes()
            .iter()
            .zip(&u)
            .map(|(x, v)| (v - 2.0 * x.sin()).abs())
            .fold(0.0, f64::max);
        assert!(err < h * h, "err = {err}");
    }

    #[test]
    fn closed_form_eigenvalues() {
        let cfg = SolverConfig::default();
        let g = interval(0.0, PI, 2000);
        let p = principal_eig_linear(&CovarianceField::constant(2.0, &g), &g, &cfg).unwrap();
        assert!((p.lambda - 1.0).abs() < 1e-3);
        assert!(p.eta.iter().all(|&v| v > 0.0));
        assert!((p.eta_at(&g, PI / 2.0).unwrap() - 1.0).abs() < 1e-14);
        let g = interval(0.0, PI / 2.0, 2000);
        let p = principal_eig_linear(&CovarianceField::constant(2.0, &g), &g, &cfg).unwrap();
        assert!((p.lambda - 4.0).abs() < 4e-3);
    }

    #[test]
    fn non_positive_coefficient_rejected() {
        let g = interval(0.0, 1.0, 20);
        let mut v = vec![1.0; 20];
        v[3] = 0.0;
        assert!(solve_linear_dirichlet(&CovarianceField::Scalar(v), &[1.0; 20], &g).is_err());
    }
}
