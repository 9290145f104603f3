use crate::domain::Grid;
use crate::eigen::EigenPair;
use crate::error::{Error, Result};
use crate::fields::CovarianceField;

/// Piecewise-linear values on the knots of a grid, boundary knots included.
#[derive(Debug, Clone)]
pub(crate) struct KnotTable {
    lo: f64,
    h: f64,
    values: Vec<f64>,
}

impl KnotTable {
    fn new(grid: &Grid, values: Vec<f64>) -> Self {
        Self {
            lo: grid.domain().coordinate_range().0,
            h: grid.spacing(),
            values,
        }
    }

    /// Cell index and the offset inside the cell, or `None` off the closure.
    #[inline]
    fn locate(&self, s: f64) -> Option<(usize, f64)> {
        let u = (s - self.lo) / self.h;
        let last = self.values.len() - 1;
        if !(u >= 0.0 && u <= last as f64) {
            return None;
        }
        let j = (u.floor() as usize).min(last - 1);
        Some((j, u - j as f64))
    }

    #[inline]
    pub fn value(&self, s: f64) -> Option<f64> {
        self.locate(s)
            .map(|(j, w)| (1.0 - w) * self.values[j] + w * self.values[j + 1])
    }

    /// Value and slope inside the cell containing `s`.
    #[inline]
    pub fn value_slope(&self, s: f64) -> Option<(f64, f64)> {
        self.locate(s).map(|(j, w)| {
            let (a, b) = (self.values[j], self.values[j + 1]);
            ((1.0 - w) * a + w * b, (b - a) / self.h)
        })
    }
}

/// `η` and its gradient along the reduced coordinate, on the knots.
#[derive(Debug, Clone)]
pub(crate) struct EtaTable {
    pub eta: KnotTable,
    pub grad: KnotTable,
}

impl EtaTable {
    pub fn new(pair: &EigenPair, grid: &Grid) -> Result<Self> {
        if pair.eta.len() != grid.len() {
            return Err(Error::input(format!(
                "eigenfunction has {} values, grid has {} nodes",
                pair.eta.len(),
                grid.len()
            )));
        }
        if let Some(i) = pair.eta.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::input(format!(
                "reference eigenfunction is not positive at node {i}"
            )));
        }
        let knots: Vec<f64> = (0..grid.knot_count())
            .map(|j| grid.dirichlet_knot_value(&pair.eta, j))
            .collect();
        let h = grid.spacing();
        let last = knots.len() - 1;
        let grad: Vec<f64> = (0..=last)
            .map(|j| {
                if j == 0 {
                    if grid.is_ball() {
                        0.0
                    } else {
                        (knots[1] - knots[0]) / h
                    }
                } else if j == last {
                    (knots[last] - knots[last - 1]) / h
                } else {
                    (knots[j + 1] - knots[j - 1]) / (2.0 * h)
                }
            })
            .collect();
        Ok(Self {
            eta: KnotTable::new(grid, knots),
            grad: KnotTable::new(grid, grad),
        })
    }
}

/// Covariance coefficients on the knots; boundary knots take the nearest node value.
#[derive(Debug, Clone)]
pub(crate) struct CoefficientTable {
    pub radial: KnotTable,
    pub tangential: KnotTable,
    constant: Option<(f64, f64)>,
}

impl CoefficientTable {
    pub fn new(c: &CovarianceField, grid: &Grid) -> Result<Self> {
        let f = c.frame(grid)?;
        if f.radial
            .iter()
            .chain(&f.tangential)
            .any(|&v| !(v > 0.0 && v.is_finite()))
        {
            return Err(Error::input("covariance must be positive at every node"));
        }
        let extend = |v: &[f64]| -> Vec<f64> {
            let mut out = Vec::with_capacity(grid.knot_count());
            if !grid.is_ball() {
                out.push(v[0]);
            }
            out.extend_from_slice(v);
            out.push(v[v.len() - 1]);
            out
        };
        let first = (f.radial[0], f.tangential[0]);
        let constant =
            (f.radial.iter().all(|&v| v == first.0) && f.tangential.iter().all(|&v| v == first.1)).then_some(first);
        Ok(Self {
            radial: KnotTable::new(grid, extend(&f.radial)),
            tangential: KnotTable::new(grid, extend(&f.tangential)),
            constant,
        })
    }

    #[inline]
    pub fn radial_slope(&self, s: f64) -> Option<(f64, f64)> {
        match self.constant {
            Some((r, _)) => Some((r, 0.0)),
            None => self.radial.value_slope(s),
        }
    }

    #[inline]
    pub fn at(&self, s: f64) -> Option<(f64, f64)> {
        match self.constant {
            Some(c) => Some(c),
            None => Some((self.radial.value(s)?, self.tangential.value(s)?)),
        }
    }
}
