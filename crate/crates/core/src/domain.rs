//! Domains, exhaustion families and uniform grids.
//!
//! Intervals and balls only. On a ball every field is radial, so a grid is a
//! uniform mesh in the radius and all operators reduce to one dimension.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_GRID_NODES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Ball { dim: usize, center: Vec<f64>, radius: f64 },
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::input(format!("interval ({a}, {b}) must satisfy a < b")));
        }
        Ok(Domain::Interval { a, b })
    }

    pub fn ball(dim: usize, center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::input(format!("ball dimension {dim} not in {{2, 3}}")));
        }
        if center.len() != dim || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::input("ball center must be a finite point of matching dimension"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::input(format!("ball radius {radius} must be positive")));
        }
        Ok(Domain::Ball { dim, center, radius })
    }

    /// Unit ball centered at the origin.
    pub fn unit_ball(dim: usize) -> Result<Self> {
        Self::ball(dim, vec![0.0; dim], 1.0)
    }

    /// Ambient dimension of the state space.
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Ball { dim, .. } => *dim,
        }
    }

    /// Length of an interval, radius of a ball.
    pub fn extent(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::Ball { radius, .. } => *radius,
        }
    }

    /// Range of the reduced coordinate: `x` on an interval, `r` on a ball.
    pub fn coordinate_range(&self) -> (f64, f64) {
        match self {
            Domain::Interval { a, b } => (*a, *b),
            Domain::Ball { radius, .. } => (0.0, *radius),
        }
    }

    /// Reduced coordinate of a point.
    pub fn coordinate(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.dim() {
            return Err(Error::input(format!(
                "point has dimension {}, domain has {}",
                point.len(),
                self.dim()
            )));
        }
        Ok(match self {
            Domain::Interval { .. } => point[0],
            Domain::Ball { center, .. } => radial_distance(point, center),
        })
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        match (self, self.coordinate(point)) {
            (Domain::Interval { a, b }, Ok(x)) => *a < x && x < *b,
            (Domain::Ball { radius, .. }, Ok(r)) => r < *radius,
            _ => false,
        }
    }

    /// Distance from an interior point to the boundary.
    pub fn distance_to_boundary(&self, point: &[f64]) -> f64 {
        match self {
            Domain::Interval { a, b } => (point[0] - a).min(b - point[0]),
            Domain::Ball { center, radius, .. } => radius - radial_distance(point, center),
        }
    }

    pub fn center_point(&self) -> Vec<f64> {
        match self {
            Domain::Interval { a, b } => vec![0.5 * (a + b)],
            Domain::Ball { center, .. } => center.clone(),
        }
    }

    /// Reduced coordinate of the center (midpoint, or `r = 0`).
    pub fn center_coordinate(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => 0.5 * (a + b),
            Domain::Ball { .. } => 0.0,
        }
    }

    /// True if the closure of `self` lies strictly inside `other`.
    pub fn closure_inside(&self, other: &Domain) -> bool {
        match (self, other) {
            (Domain::Interval { a, b }, Domain::Interval { a: a2, b: b2 }) => a2 < a && b < b2,
            (
                Domain::Ball { dim, center, radius },
                Domain::Ball {
                    dim: dim2,
                    center: center2,
                    radius: radius2,
                },
            ) => dim == dim2 && radial_distance(center, center2) + radius < *radius2,
            _ => false,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Interval { a, b } => write!(f, "interval ({a}, {b})"),
            Domain::Ball { dim, center, radius } => {
                write!(f, "ball in R^{dim} centered at {center:?} with radius {radius}")
            }
        }
    }
}

pub(crate) fn radial_distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// The set `E` on which the uncertainty envelope lives. Bounded regions are
/// domains themselves; the unbounded ones only appear as exhaustion parents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    Bounded { domain: Domain },
    HalfLine { a: f64 },
    Line,
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Bounded { domain } => domain.dim(),
            Region::HalfLine { .. } | Region::Line => 1,
        }
    }

    pub fn coordinate(&self, point: &[f64]) -> Result<f64> {
        match self {
            Region::Bounded { domain } => domain.coordinate(point),
            _ if point.len() == 1 => Ok(point[0]),
            _ => Err(Error::input("unbounded regions are one-dimensional")),
        }
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        match self {
            Region::Bounded { domain } => domain.contains(point),
            Region::HalfLine { a } => point.len() == 1 && point[0] > *a,
            Region::Line => point.len() == 1 && point[0].is_finite(),
        }
    }

    /// True if `domain` is a subset of the region (closure not required).
    pub fn contains_domain(&self, domain: &Domain) -> bool {
        match (self, domain) {
            (Region::Bounded { domain: outer }, inner) => inner == outer || inner.closure_inside(outer),
            (Region::HalfLine { a }, Domain::Interval { a: lo, .. }) => lo >= a,
            (Region::Line, Domain::Interval { .. }) => true,
            _ => false,
        }
    }
}

impl From<Domain> for Region {
    fn from(domain: Domain) -> Self {
        Region::Bounded { domain }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Bounded { domain } => domain.fmt(f),
            Region::HalfLine { a } => write!(f, "half-line ({a}, inf)"),
            Region::Line => write!(f, "real line"),
        }
    }
}

/// Uniform grid of `n` interior nodes.
///
/// Interval `(a, b)`: `h = (b - a)/(n + 1)`, nodes `a + (i + 1) h`.
/// Ball of radius `R`: `h = R/n`, nodes `r_i = i h` for `i = 0..n`, so the
/// center is node 0 and `r_n = R` is the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    domain: Domain,
    n: usize,
    h: f64,
    nodes: Vec<f64>,
    boundary: Vec<f64>,
}

impl Grid {
    pub fn new(domain: Domain, n: usize) -> Result<Self> {
        if n < MIN_GRID_NODES {
            return Err(Error::input(format!(
                "grid needs at least {MIN_GRID_NODES} interior nodes, got {n}"
            )));
        }
        let (lo, hi) = domain.coordinate_range();
        let (h, nodes) = match domain {
            Domain::Interval { .. } => {
                let h = (hi - lo) / (n + 1) as f64;
                (h, (0..n).map(|i| lo + (i + 1) as f64 * h).collect())
            }
            Domain::Ball { .. } => {
                let h = hi / n as f64;
                (h, (0..n).map(|i| i as f64 * h).collect())
            }
        };
        let boundary = match domain {
            Domain::Interval { .. } => vec![lo, hi],
            Domain::Ball { .. } => vec![hi],
        };
        Ok(Self {
            domain,
            n,
            h,
            nodes,
            boundary,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Reduced coordinates of the interior nodes.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn boundary(&self) -> &[f64] {
        &self.boundary
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.domain, Domain::Ball { .. })
    }

    /// Multiplicity of the tangential Hessian eigenvalue (`d - 1` on a ball).
    pub fn tangential_multiplicity(&self) -> usize {
        self.domain.dim() - 1
    }

    /// Same domain, different resolution.
    pub fn with_nodes(&self, n: usize) -> Result<Self> {
        Self::new(self.domain.clone(), n)
    }

    fn first_knot(&self) -> f64 {
        self.domain.coordinate_range().0
    }

    /// Piecewise-linear interpolation of a grid function that vanishes on the
    /// boundary. Returns `None` outside the closed domain.
    pub fn interpolate(&self, values: &[f64], s: f64) -> Option<f64> {
        debug_assert_eq!(values.len(), self.n);
        let (lo, hi) = self.domain.coordinate_range();
        if !(s >= lo && s <= hi) {
            return None;
        }
        let knot = |j: usize| -> f64 { self.dirichlet_knot_value(values, j) };
        let last = self.knot_count() - 1;
        let u = (s - self.first_knot()) / self.h;
        let j = (u.floor() as usize).min(last - 1);
        let w = u - j as f64;
        Some((1.0 - w) * knot(j) + w * knot(j + 1))
    }

    /// Knots including boundary points: `n + 2` on an interval, `n + 1` on a ball.
    pub(crate) fn knot_count(&self) -> usize {
        match self.domain {
            Domain::Interval { .. } => self.n + 2,
            Domain::Ball { .. } => self.n + 1,
        }
    }

    #[inline]
    pub(crate) fn dirichlet_knot_value(&self, values: &[f64], j: usize) -> f64 {
        match self.domain {
            Domain::Interval { .. } => {
                if j == 0 || j == self.n + 1 {
                    0.0
                } else {
                    values[j - 1]
                }
            }
            Domain::Ball { .. } => {
                if j == self.n {
                    0.0
                } else {
                    values[j]
                }
            }
        }
    }

    /// Piecewise-linear interpolation of a nodal field (no boundary values);
    /// constant extension beyond the outermost nodes.
    pub fn interpolate_field(&self, values: &[f64], s: f64) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        let u = (s - self.nodes[0]) / self.h;
        if !(u > 0.0) {
            return values[0];
        }
        let j = u.floor() as usize;
        if j >= self.n - 1 {
            return values[self.n - 1];
        }
        let w = u - j as f64;
        (1.0 - w) * values[j] + w * values[j + 1]
    }
}

/// Spacing rule for exhaustion members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkRule {
    /// `delta_n = (half extent) / (n + offset)`.
    pub offset: f64,
}

impl Default for ShrinkRule {
    fn default() -> Self {
        Self { offset: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustionFamily {
    pub parent: Region,
    pub members: Vec<Domain>,
}

/// Nested domains `E_1 ⊂ E_2 ⊂ ...` with closures strictly increasing.
///
/// For a bounded interval `(a, b)` the default rule gives
/// `E_n = (a + δ_n, b - δ_n)` with `δ_n = (b - a)/(2(n + 2))`; a ball of
/// radius `R` gets radii `R (1 - 1/(n + 2))`. A half-line `(a, inf)` uses
/// `(a + 1/(n + 1), a + n + 1)` and the line `(-(n + 1), n + 1)`.
pub fn build_exhaustion(parent: &Region, n_max: usize, rule: ShrinkRule) -> Result<ExhaustionFamily> {
    if n_max < 1 {
        return Err(Error::input("exhaustion needs n_max >= 1"));
    }
    if !(rule.offset.is_finite() && rule.offset > 1.0) {
        return Err(Error::input("shrink offset must exceed 1"));
    }
    let members = (1..=n_max)
        .map(|n| {
            let k = n as f64;
            match parent {
                Region::Bounded {
                    domain: Domain::Interval { a, b },
                } => {
                    let delta = (b - a) / (2.0 * (k + rule.offset));
                    Domain::interval(a + delta, b - delta)
                }
                Region::Bounded {
                    domain: Domain::Ball { dim, center, radius },
                } => Domain::ball(*dim, center.clone(), radius * (1.0 - 1.0 / (k + rule.offset))),
                Region::HalfLine { a } => Domain::interval(a + 1.0 / (k + 1.0), a + k + 1.0),
                Region::Line => Domain::interval(-(k + 1.0), k + 1.0),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExhaustionFamily {
        parent: parent.clone(),
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn interval_grid_layout() {
        let g = Grid::new(Domain::interval(0.0, 1.0).unwrap(), 19).unwrap();
        assert!((g.spacing() - 0.05).abs() < 1e-15);
        assert!((g.nodes()[0] - 0.05).abs() < 1e-15);
        assert!((g.nodes()[18] - 0.95).abs() < 1e-15);
        assert_eq!(g.boundary(), &[0.0, 1.0]);
    }

    #[test]
    fn ball_grid_layout() {
        let g = Grid::new(Domain::unit_ball(2).unwrap(), 20).unwrap();
        assert_eq!(g.nodes()[0], 0.0);
        assert!((g.nodes()[19] - 0.95).abs() < 1e-15);
        assert_eq!(g.boundary(), &[1.0]);
        assert_eq!(g.tangential_multiplicity(), 1);
    }

    #[test]
    fn small_grids_rejected() {
        assert!(Grid::new(Domain::interval(0.0, 1.0).unwrap(), 15).is_err());
    }

    #[test]
    fn interpolation_hits_nodes_and_boundary() {
        let g = Grid::new(Domain::interval(0.0, PI).unwrap(), 31).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|x| x.sin()).collect();
        assert_eq!(g.interpolate(&v, 0.0), Some(0.0));
        assert_eq!(g.interpolate(&v, PI), Some(0.0));
        assert!((g.interpolate(&v, g.nodes()[7]).unwrap() - v[7]).abs() < 1e-15);
        assert_eq!(g.interpolate(&v, -0.1), None);
        let b = Grid::new(Domain::unit_ball(3).unwrap(), 16).unwrap();
        let w: Vec<f64> = b.nodes().iter().map(|r| 1.0 - r * r).collect();
        assert_eq!(b.interpolate(&w, 1.0), Some(0.0));
        assert_eq!(b.interpolate(&w, 0.0), Some(1.0));
    }

    #[test]
    fn exhaustion_rule_arithmetic() {
        let parent = Region::from(Domain::interval(0.0, PI).unwrap());
        let fam = build_exhaustion(&parent, 20, ShrinkRule::default()).unwrap();
        match &fam.members[0] {
            Domain::Interval { a, b } => {
                assert!((a - PI / 6.0).abs() < 1e-15);
                assert!((b - 5.0 * PI / 6.0).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
        match &fam.members[1] {
            Domain::Interval { a, b } => {
                assert!((a - PI / 8.0).abs() < 1e-15);
                assert!((b - 7.0 * PI / 8.0).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
        for w in fam.members.windows(2) {
            assert!(w[0].closure_inside(&w[1]));
            assert!(w[0].extent() < w[1].extent());
        }
        assert!(build_exhaustion(&parent, 0, ShrinkRule::default()).is_err());
    }

    #[test]
    fn exhaustion_of_unbounded_parents_nests() {
        for parent in [Region::HalfLine { a: 0.0 }, Region::Line] {
            let fam = build_exhaustion(&parent, 10, ShrinkRule::default()).unwrap();
            for w in fam.members.windows(2) {
                assert!(w[0].closure_inside(&w[1]));
            }
            assert!(fam.members.iter().all(|d| parent.contains_domain(d)));
        }
        let ball = Region::from(Domain::unit_ball(2).unwrap());
        let fam = build_exhaustion(&ball, 5, ShrinkRule::default()).unwrap();
        assert!((fam.members[0].extent() - 2.0 / 3.0).abs() < 1e-15);
    }
}
