//! Finite-difference stencils for 1D and radial operators.
//!
//! Interval nodes use the central second difference. Ball nodes at `r > 0`
//! use central differences for `u''` and `u'/r`; at `r = 0` both Hessian
//! eigenvalues equal `2 (u(h) - u(0)) / h²`.

use crate::domain::Grid;
use crate::error::{Error, Result};

/// Hessian eigenvalues at every node: `radial` is `u''`, `tangential` is
/// `u'/r` with multiplicity `d - 1` (unused on intervals).
#[derive(Debug, Clone, PartialEq)]
pub struct HessianField {
    pub radial: Vec<f64>,
    pub tangential: Vec<f64>,
    pub tangential_multiplicity: usize,
}

impl HessianField {
    /// Eigenvalue list at node `i`, with multiplicity.
    pub fn eigenvalues(&self, i: usize) -> Vec<f64> {
        let mut v = vec![self.radial[i]];
        v.extend(std::iter::repeat_n(self.tangential[i], self.tangential_multiplicity));
        v
    }

    pub fn len(&self) -> usize {
        self.radial.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radial.is_empty()
    }

    /// `Σ |e_i|` at node `i`.
    pub fn abs_sum(&self, i: usize) -> f64 {
        self.radial[i].abs() + self.tangential_multiplicity as f64 * self.tangential[i].abs()
    }
}

/// Per-node Hessian eigenvalues of a grid function vanishing on the boundary.
pub fn discrete_hessian(eta: &[f64], grid: &Grid) -> Result<HessianField> {
    if eta.len() != grid.len() {
        return Err(Error::input(format!(
            "grid function has {} values, grid has {} nodes",
            eta.len(),
            grid.len()
        )));
    }
    if eta.len() < 3 {
        return Err(Error::input("discrete Hessian needs at least 3 nodes"));
    }
    Ok(hessian_with_stride(eta, grid, 1))
}

/// Hessian using neighbours `stride` nodes away (spacing `stride * h`).
pub(crate) fn hessian_with_stride(eta: &[f64], grid: &Grid, stride: usize) -> HessianField {
    let n = grid.len();
    let base = grid.spacing();
    let at = |j: isize| -> f64 {
        if j < 0 || j as usize >= n {
            0.0
        } else {
            eta[j as usize]
        }
    };
    // index n (and -1 on intervals) is the boundary knot; past it the stencil
    // would leave the closure, so such nodes drop back to stride 1
    let stride_at = |i: usize| -> isize {
        let s = stride as isize;
        let i = i as isize;
        let inside = i + s <= n as isize && (grid.is_ball() || i - s >= -1);
        if inside {
            s
        } else {
            1
        }
    };
    let mut radial = Vec::with_capacity(n);
    let mut tangential = Vec::with_capacity(n);
    if grid.is_ball() {
        for i in 0..n {
            let s = stride_at(i);
            let h = base * s as f64;
            let r = grid.nodes()[i];
            if i == 0 {
                let v = 2.0 * (at(s) - eta[0]) / (h * h);
                radial.push(v);
                tangential.push(v);
                continue;
            }
            let (ip, im) = (i as isize + s, i as isize - s);
            // mirror through the center for the stride > 1 estimates near r = 0
            let um = if im < 0 { at(-im) } else { at(im) };
            let up = at(ip);
            radial.push((um - 2.0 * eta[i] + up) / (h * h));
            tangential.push((up - um) / (2.0 * h * r));
        }
    } else {
        for i in 0..n {
            let s = stride_at(i);
            let h = base * s as f64;
            let (ip, im) = (i as isize + s, i as isize - s);
            radial.push((at(im) - 2.0 * eta[i] + at(ip)) / (h * h));
            tangential.push(0.0);
        }
    }
    HessianField {
        radial,
        tangential,
        tangential_multiplicity: grid.tangential_multiplicity(),
    }
}

/// Tridiagonal form of `L u = ½ (a_r u'' + (d-1) a_t u'/r)` with zero
/// Dirichlet data: row `i` reads `lower[i] u[i-1] + diag[i] u[i] + upper[i] u[i+1]`.
#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

pub(crate) fn assemble(grid: &Grid, radial: &[f64], tangential: &[f64]) -> Tridiagonal {
    let n = grid.len();
    let h = grid.spacing();
    let h2 = h * h;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    if grid.is_ball() {
        let m = grid.tangential_multiplicity() as f64;
        let k = 0.5 * (radial[0] + m * tangential[0]) * 2.0 / h2;
        diag[0] = -k;
        upper[0] = k;
        for i in 1..n {
            let r = grid.nodes()[i];
            let second = 0.5 * radial[i] / h2;
            let first = 0.5 * m * tangential[i] / (2.0 * h * r);
            lower[i] = second - first;
            diag[i] = -2.0 * second;
            upper[i] = second + first;
        }
    } else {
        for i in 0..n {
            let k = 0.5 * radial[i] / h2;
            lower[i] = k;
            diag[i] = -2.0 * k;
            upper[i] = k;
        }
    }
    Tridiagonal { lower, diag, upper }
}

impl Tridiagonal {
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * u[i];
                if i > 0 {
                    s += self.lower[i] * u[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * u[i + 1];
                }
                s
            })
            .collect()
    }

    /// Row-wise `Σ |a_ij|`, the max-norm of the operator.
    pub fn norm(&self) -> f64 {
        (0..self.diag.len())
            .map(|i| self.lower[i].abs() + self.diag[i].abs() + self.upper[i].abs())
            .fold(0.0, f64::max)
    }

    /// Thomas elimination.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = rhs.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::Internal("singular tridiagonal system at row 0".into()));
        }
        c[0] = self.upper[0] / pivot;
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.lower[i] * c[i - 1];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::Internal(format!("singular tridiagonal system at row {i}")));
            }
            c[i] = if i + 1 < n { self.upper[i] / pivot } else { 0.0 };
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use std::f64::consts::PI;

    #[test]
    fn quadratic_is_exact_on_interval() {
        let g = Grid::new(Domain::interval(0.0, PI).unwrap(), 100).unwrap();
        let eta: Vec<f64> = g.nodes().iter().map(|x| x * (PI - x)).collect();
        let hess = discrete_hessian(&eta, &g).unwrap();
        assert!(hess.radial.iter().all(|v| (v + 2.0).abs() < 1e-9));
    }

    #[test]
    fn radial_quadratic_is_exact() {
        let g = Grid::new(Domain::unit_ball(2).unwrap(), 64).unwrap();
        let eta: Vec<f64> = g.nodes().iter().map(|r| 1.0 - r * r).collect();
        let hess = discrete_hessian(&eta, &g).unwrap();
        for i in 0..g.len() {
            assert!((hess.radial[i] + 2.0).abs() < 1e-9, "node {i}");
            assert!((hess.tangential[i] + 2.0).abs() < 1e-9, "node {i}");
        }
        assert_eq!(hess.eigenvalues(5).len(), 2);
    }

    #[test]
    fn sine_second_difference_is_second_order() {
        let g = Grid::new(Domain::interval(0.0, PI).unwrap(), 2000).unwrap();
        let eta: Vec<f64> = g.nodes().iter().map(|x| x.sin()).collect();
        let hess = discrete_hessian(&eta, &g).unwrap();
        let h = g.spacing();
        let err = g
            .nodes()
            .iter()
            .zip(&hess.radial)
            .map(|(x, v)| (v + x.sin()).abs())
            .fold(0.0, f64::max);
        // Taylor remainder: |u''''| h² / 12 <= h² / 12
        assert!(err <= 2.0 * h * h, "err = {err}, h = {h}");
        assert!(err <= h * h / 12.0 + 1e-9);
    }

    #[test]
    fn length_mismatch_is_input_error() {
        let g = Grid::new(Domain::interval(0.0, 1.0).unwrap(), 20).unwrap();
        assert!(discrete_hessian(&[1.0, 2.0], &g).is_err());
    }

    #[test]
    fn assembled_operator_matches_hessian() {
        let g = Grid::new(Domain::unit_ball(3).unwrap(), 40).unwrap();
        let eta: Vec<f64> = g.nodes().iter().map(|r| (1.0 - r * r) * (2.0 + r)).collect();
        let a_r: Vec<f64> = g.nodes().iter().map(|r| 1.0 + r).collect();
        let a_t: Vec<f64> = g.nodes().iter().map(|r| 2.0 - r).collect();
        let op = assemble(&g, &a_r, &a_t);
        let lu = op.apply(&eta);
        let hess = discrete_hessian(&eta, &g).unwrap();
        for i in 0..g.len() {
            let want = 0.5 * (a_r[i] * hess.radial[i] + 2.0 * a_t[i] * hess.tangential[i]);
            assert!((lu[i] - want).abs() < 1e-9 * (1.0 + want.abs()), "node {i}");
        }
    }

    #[test]
    fn thomas_solves() {
        let t = Tridiagonal {
            lower: vec![0.0, 1.0, 1.0, 1.0],
            diag: vec![-4.0, -4.0, -4.0, -4.0],
            upper: vec![1.0, 1.0, 1.0, 0.0],
        };
        let x = vec![1.0, -2.0, 0.5, 3.0];
        let b = t.apply(&x);
        let y = t.solve(&b).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
