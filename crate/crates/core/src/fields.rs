//! The uncertainty envelope `(θ, Θ)` and admissible covariance fields.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, Grid, Region};
use crate::error::{Error, Result};
use crate::matrix::{eig_sym, SymmetricMatrix};
use crate::pucci::EllipticityPair;
use crate::seed;

/// Spectral tolerance for admissibility.
pub const ADMISSIBILITY_TOL: f64 = 1e-10;

/// A scalar function of the reduced coordinate (`x` on intervals, `r` on balls).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarField {
    Constant(f64),
    /// Piecewise-linear through `(knots[i], values[i])`, constant outside.
    Tabulated {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
    Profile(Profile),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum Profile {
    /// `intercept + slope * s`
    Affine { intercept: f64, slope: f64 },
    /// `mean + amplitude * cos(wavenumber * s)`
    Cosine { mean: f64, amplitude: f64, wavenumber: f64 },
}

impl ScalarField {
    pub fn tabulated(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() || knots.is_empty() {
            return Err(Error::input("tabulated field needs equal, non-empty knots and values"));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::input("tabulated knots must be strictly increasing"));
        }
        if values.iter().chain(&knots).any(|v| !v.is_finite()) {
            return Err(Error::input("tabulated field has non-finite entries"));
        }
        Ok(ScalarField::Tabulated { knots, values })
    }

    /// Tabulated on the interior nodes of a grid.
    pub fn on_grid(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::input("field length does not match grid"));
        }
        Self::tabulated(grid.nodes().to_vec(), values)
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            ScalarField::Constant(v) => *v,
            ScalarField::Tabulated { knots, values } => {
                let last = knots.len() - 1;
                if s <= knots[0] {
                    return values[0];
                }
                if s >= knots[last] {
                    return values[last];
                }
                let j = knots.partition_point(|&k| k <= s) - 1;
                let w = (s - knots[j]) / (knots[j + 1] - knots[j]);
                (1.0 - w) * values[j] + w * values[j + 1]
            }
            ScalarField::Profile(Profile::Affine { intercept, slope }) => intercept + slope * s,
            ScalarField::Profile(Profile::Cosine {
                mean,
                amplitude,
                wavenumber,
            }) => mean + amplitude * (wavenumber * s).cos(),
        }
    }

    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.nodes().iter().map(|&s| self.eval(s)).collect()
    }
}

/// The envelope `(θ, Θ)`: `lower` is `θ`, `upper` is `Θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundFields {
    pub lower: ScalarField,
    pub upper: ScalarField,
    pub region: Region,
    /// Whether `θ = Θ` is tolerated (degenerate envelope, linear `F`).
    #[serde(default)]
    pub degenerate: bool,
}

const VALIDATION_SAMPLES: usize = 1025;

impl BoundFields {
    /// Requires `0 < θ < Θ` on the region.
    pub fn new(lower: ScalarField, upper: ScalarField, region: impl Into<Region>) -> Result<Self> {
        let b = Self {
            lower,
            upper,
            region: region.into(),
            degenerate: false,
        };
        b.check_samples()?;
        Ok(b)
    }

    /// Allows `θ = Θ`, which makes `F` the linear operator `L^{θ I}`.
    pub fn degenerate(lower: ScalarField, upper: ScalarField, region: impl Into<Region>) -> Result<Self> {
        let b = Self {
            lower,
            upper,
            region: region.into(),
            degenerate: true,
        };
        b.check_samples()?;
        Ok(b)
    }

    pub fn constant(lower: f64, upper: f64, region: impl Into<Region>) -> Result<Self> {
        Self::new(ScalarField::Constant(lower), ScalarField::Constant(upper), region)
    }

    fn check_samples(&self) -> Result<()> {
        let (lo, hi) = match &self.region {
            Region::Bounded { domain } => domain.coordinate_range(),
            // only the nodes of the domains actually solved on are checked
            Region::HalfLine { .. } | Region::Line => return Ok(()),
        };
        for k in 0..VALIDATION_SAMPLES {
            let s = lo + (hi - lo) * k as f64 / (VALIDATION_SAMPLES - 1) as f64;
            self.check_at(s)?;
        }
        Ok(())
    }

    fn check_at(&self, s: f64) -> Result<()> {
        let (l, u) = (self.lower.eval(s), self.upper.eval(s));
        if !(l.is_finite() && u.is_finite()) {
            return Err(Error::input(format!("non-finite envelope at coordinate {s}")));
        }
        if !(l > 0.0) {
            return Err(Error::input(format!("θ({s}) = {l} must be positive")));
        }
        let ok = if self.degenerate { l <= u } else { l < u };
        if !ok {
            return Err(Error::input(format!(
                "envelope requires θ < Θ; at coordinate {s}: θ = {l}, Θ = {u}"
            )));
        }
        Ok(())
    }

    /// Checks `0 < θ < Θ` at every node of a grid on a subdomain of the region.
    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if !self.region.contains_domain(grid.domain()) {
            return Err(Error::input(format!(
                "grid domain {} is not inside the envelope region {}",
                grid.domain(),
                self.region
            )));
        }
        grid.nodes().iter().try_for_each(|&s| self.check_at(s))
    }

    /// `(θ(s), Θ(s))` at a reduced coordinate.
    #[inline]
    pub fn at(&self, s: f64) -> (f64, f64) {
        (self.lower.eval(s), self.upper.eval(s))
    }

    pub fn pair_at_point(&self, point: &[f64]) -> Result<EllipticityPair> {
        if !self.region.contains(point) {
            return Err(Error::Domain {
                point: point.to_vec(),
                domain: self.region.to_string(),
            });
        }
        let s = self.region.coordinate(point)?;
        let (l, u) = self.at(s);
        EllipticityPair::new(l, u)
    }

    /// Nodal values of `θ` and `Θ`.
    pub fn on_grid(&self, grid: &Grid) -> (Vec<f64>, Vec<f64>) {
        (self.lower.sample(grid), self.upper.sample(grid))
    }

    /// `min (Θ - θ)` over the closed domain (nodes plus boundary points).
    pub fn min_gap(&self, grid: &Grid) -> f64 {
        grid.nodes()
            .iter()
            .chain(grid.boundary())
            .map(|&s| {
                let (l, u) = self.at(s);
                u - l
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// An element of the admissible class, tabulated on grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovarianceField {
    /// `c(x) = value · I`.
    Scalar(Vec<f64>),
    /// On a ball: `c = c_r e_r e_r' + c_t (I - e_r e_r')`.
    Radial {
        radial: Vec<f64>,
        tangential: Vec<f64>,
    },
    Matrices(Vec<SymmetricMatrix>),
}

/// Per-node coefficients in the reduced (radial, tangential) frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCoefficients {
    pub radial: Vec<f64>,
    pub tangential: Vec<f64>,
}

impl CovarianceField {
    pub fn constant(value: f64, grid: &Grid) -> Self {
        CovarianceField::Scalar(vec![value; grid.len()])
    }

    pub fn len(&self) -> usize {
        match self {
            CovarianceField::Scalar(v) => v.len(),
            CovarianceField::Radial { radial, .. } => radial.len(),
            CovarianceField::Matrices(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check_shape(&self, grid: &Grid) -> Result<()> {
        if self.len() != grid.len() {
            return Err(Error::input(format!(
                "covariance field has {} nodes, grid has {}",
                self.len(),
                grid.len()
            )));
        }
        match self {
            CovarianceField::Radial { radial, tangential } => {
                if !grid.is_ball() {
                    return Err(Error::input("radially framed covariance needs a ball"));
                }
                if radial.len() != tangential.len() {
                    return Err(Error::input("radial and tangential lengths differ"));
                }
            }
            CovarianceField::Matrices(ms) => {
                let d = grid.domain().dim();
                if ms.iter().any(|m| m.dim() != d) {
                    return Err(Error::input(format!("covariance matrices must be {d}x{d}")));
                }
            }
            CovarianceField::Scalar(_) => {}
        }
        Ok(())
    }

    /// Coefficients in the reduced frame. Matrix fields on a ball must be
    /// radially framed along the reference direction `e_1`.
    pub fn frame(&self, grid: &Grid) -> Result<FrameCoefficients> {
        self.check_shape(grid)?;
        match self {
            CovarianceField::Scalar(v) => Ok(FrameCoefficients {
                radial: v.clone(),
                tangential: v.clone(),
            }),
            CovarianceField::Radial { radial, tangential } => Ok(FrameCoefficients {
                radial: radial.clone(),
                tangential: tangential.clone(),
            }),
            CovarianceField::Matrices(ms) => {
                let mut radial = Vec::with_capacity(ms.len());
                let mut tangential = Vec::with_capacity(ms.len());
                for (i, m) in ms.iter().enumerate() {
                    let d = m.dim();
                    let t = if d > 1 { m.get(1, 1) } else { m.get(0, 0) };
                    let framed =
                        (0..d).all(|p| (p + 1..d).all(|q| m.get(p, q) == 0.0)) && (1..d).all(|p| m.get(p, p) == t);
                    if !framed {
                        return Err(Error::input(format!(
                            "matrix at node {i} is not radially framed; general anisotropic fields on balls are unsupported"
                        )));
                    }
                    radial.push(m.get(0, 0));
                    tangential.push(t);
                }
                Ok(FrameCoefficients { radial, tangential })
            }
        }
    }

    /// Per-node matrices; radial frames are written along `e_1`.
    pub fn to_matrices(&self, dim: usize) -> Vec<SymmetricMatrix> {
        let diag = |r: f64, t: f64| {
            let mut v = vec![t; dim];
            v[0] = r;
            SymmetricMatrix::diag(&v).expect("finite coefficients")
        };
        match self {
            CovarianceField::Scalar(v) => v.iter().map(|&c| diag(c, c)).collect(),
            CovarianceField::Radial { radial, tangential } => {
                radial.iter().zip(tangential).map(|(&r, &t)| diag(r, t)).collect()
            }
            CovarianceField::Matrices(ms) => ms.clone(),
        }
    }

    /// Inverse of [`CovarianceField::to_matrices`] for radially framed fields.
    pub fn radial_from_matrices(ms: &[SymmetricMatrix], grid: &Grid) -> Result<Self> {
        let f = CovarianceField::Matrices(ms.to_vec()).frame(grid)?;
        Ok(CovarianceField::Radial {
            radial: f.radial,
            tangential: f.tangential,
        })
    }

    /// Coefficients at an arbitrary coordinate, by linear interpolation.
    pub fn frame_at(frame: &FrameCoefficients, grid: &Grid, s: f64) -> (f64, f64) {
        (
            grid.interpolate_field(&frame.radial, s),
            grid.interpolate_field(&frame.tangential, s),
        )
    }

    fn node_spectrum_bounds(&self, i: usize) -> Result<(f64, f64)> {
        Ok(match self {
            CovarianceField::Scalar(v) => (v[i], v[i]),
            CovarianceField::Radial { radial, tangential } => {
                (radial[i].min(tangential[i]), radial[i].max(tangential[i]))
            }
            CovarianceField::Matrices(ms) => {
                let s = eig_sym(&ms[i])?;
                (s.values[0], *s.values.last().expect("d >= 1"))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// `θ(x_i) - e_min(c(x_i))`; positive entries are violations.
    pub lower_violation: Vec<f64>,
    /// `e_max(c(x_i)) - Θ(x_i)`; positive entries are violations.
    pub upper_violation: Vec<f64>,
    pub max_violation: f64,
    pub worst_node: usize,
    pub worst_coordinate: f64,
    pub passed: bool,
}

/// Checks `θ(x) ≤ spectrum(c(x)) ≤ Θ(x)` at every node.
pub fn validate_covariance(c: &CovarianceField, bounds: &BoundFields, grid: &Grid) -> Result<ValidationReport> {
    c.check_shape(grid)?;
    if !bounds.region.contains_domain(grid.domain()) {
        return Err(Error::input("bounds and grid live on different domains"));
    }
    let mut lower_violation = Vec::with_capacity(grid.len());
    let mut upper_violation = Vec::with_capacity(grid.len());
    let mut worst = (f64::NEG_INFINITY, 0);
    for (i, &s) in grid.nodes().iter().enumerate() {
        let (emin, emax) = c.node_spectrum_bounds(i)?;
        if !(emin.is_finite() && emax.is_finite()) {
            return Err(Error::input(format!("non-finite covariance at node {i}")));
        }
        let (l, u) = bounds.at(s);
        let lv = l - emin;
        let uv = emax - u;
        if lv.max(uv) > worst.0 {
            worst = (lv.max(uv), i);
        }
        lower_violation.push(lv);
        upper_violation.push(uv);
    }
    Ok(ValidationReport {
        lower_violation,
        upper_violation,
        max_violation: worst.0.max(0.0),
        worst_node: worst.1,
        worst_coordinate: grid.nodes()[worst.1],
        passed: worst.0 <= ADMISSIBILITY_TOL,
    })
}

/// Families of admissible fields. All map a random profile `t(s) ∈ [0, 1]`
/// to `θ + t (Θ - θ)` except `Constant`, which draws a single value in the
/// common band `[max θ, min Θ]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SamplerSpec {
    Constant,
    /// Logistic squashing of a random cosine series with `modes` terms.
    Fourier {
        modes: usize,
        amplitude: f64,
    },
    /// Random step function with `pieces` levels, Gaussian-mollified with
    /// standard deviation `width` (fraction of the domain).
    Mollified {
        pieces: usize,
        width: f64,
    },
    /// Cycles through the three families above by seed.
    #[default]
    Mixed,
}

impl SamplerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerSpec::Constant => "constant",
            SamplerSpec::Fourier { .. } => "fourier",
            SamplerSpec::Mollified { .. } => "mollified",
            SamplerSpec::Mixed => "mixed",
        }
    }

    pub fn resolve(self, seed: u64) -> SamplerSpec {
        match self {
            SamplerSpec::Mixed => match seed % 3 {
                0 => SamplerSpec::Constant,
                1 => SamplerSpec::Fourier {
                    modes: 6,
                    amplitude: 2.0,
                },
                _ => SamplerSpec::Mollified { pieces: 8, width: 0.04 },
            },
            other => other,
        }
    }
}

/// Draws an admissible covariance field; deterministic in `seed`.
pub fn sample_covariance(bounds: &BoundFields, grid: &Grid, family: SamplerSpec, seed: u64) -> Result<CovarianceField> {
    bounds.check_grid(grid)?;
    let family = family.resolve(seed);
    let mut rng = seed::stream(seed, seed::TAG_SAMPLER, 0);
    let (lo, hi) = bounds.on_grid(grid);
    let field = match family {
        SamplerSpec::Constant => {
            let band_lo = lo.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let band_hi = hi.iter().copied().fold(f64::INFINITY, f64::min);
            if band_lo > band_hi {
                return Err(Error::input(format!(
                    "no constant fits the envelope: max θ = {band_lo} > min Θ = {band_hi}"
                )));
            }
            let v = band_lo + rng.random::<f64>() * (band_hi - band_lo);
            CovarianceField::Scalar(vec![v; grid.len()])
        }
        SamplerSpec::Fourier { modes, amplitude } => {
            if modes == 0 || !(amplitude.is_finite() && amplitude >= 0.0) {
                return Err(Error::input("fourier family needs modes >= 1 and amplitude >= 0"));
            }
            let mut draw = || {
                let t = fourier_profile(&mut rng, grid, modes, amplitude);
                scale_into(&t, &lo, &hi)
            };
            radial_or_scalar(grid, &mut draw)
        }
        SamplerSpec::Mollified { pieces, width } => {
            if pieces == 0 || !(width.is_finite() && width > 0.0) {
                return Err(Error::input("mollified family needs pieces >= 1 and width > 0"));
            }
            let mut draw = || {
                let t = mollified_profile(&mut rng, grid, pieces, width);
                scale_into(&t, &lo, &hi)
            };
            radial_or_scalar(grid, &mut draw)
        }
        SamplerSpec::Mixed => unreachable!("resolved above"),
    };
    let report = validate_covariance(&field, bounds, grid)?;
    if !report.passed {
        return Err(Error::Internal(format!(
            "sampled field violates the envelope by {} at node {}",
            report.max_violation, report.worst_node
        )));
    }
    Ok(field)
}

fn radial_or_scalar(grid: &Grid, draw: &mut impl FnMut() -> Vec<f64>) -> CovarianceField {
    if grid.is_ball() {
        let radial = draw();
        let tangential = draw();
        CovarianceField::Radial { radial, tangential }
    } else {
        CovarianceField::Scalar(draw())
    }
}

fn scale_into(t: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    t.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&t, (&l, &u))| (l + t * (u - l)).clamp(l, u))
        .collect()
}

fn unit_coordinate(grid: &Grid, s: f64) -> f64 {
    let (lo, hi) = grid.domain().coordinate_range();
    (s - lo) / (hi - lo)
}

fn fourier_profile(rng: &mut impl Rng, grid: &Grid, modes: usize, amplitude: f64) -> Vec<f64> {
    let offset = amplitude * (2.0 * rng.random::<f64>() - 1.0);
    let terms: Vec<(f64, f64)> = (1..=modes)
        .map(|k| {
            let a = amplitude * (2.0 * rng.random::<f64>() - 1.0) / k as f64;
            let phase = std::f64::consts::TAU * rng.random::<f64>();
            (a, phase)
        })
        .collect();
    grid.nodes()
        .iter()
        .map(|&s| {
            let u = unit_coordinate(grid, s);
            let g = offset
                + terms
                    .iter()
                    .enumerate()
                    .map(|(k, (a, ph))| a * ((k + 1) as f64 * std::f64::consts::PI * u + ph).cos())
                    .sum::<f64>();
            1.0 / (1.0 + (-g).exp())
        })
        .collect()
}

fn mollified_profile(rng: &mut impl Rng, grid: &Grid, pieces: usize, width: f64) -> Vec<f64> {
    let levels: Vec<f64> = (0..pieces).map(|_| rng.random::<f64>()).collect();
    let steps: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&s| {
            let u = unit_coordinate(grid, s);
            levels[((u * pieces as f64) as usize).min(pieces - 1)]
        })
        .collect();
    let (lo, hi) = grid.domain().coordinate_range();
    let sigma_nodes = width * (hi - lo) / grid.spacing();
    gaussian_smooth(&steps, sigma_nodes)
}

/// Normalized Gaussian-weight moving average with reflection at both ends.
/// `sigma` is measured in nodes; the window is truncated at four sigma.
pub fn gaussian_smooth(values: &[f64], sigma: f64) -> Vec<f64> {
    let n = values.len();
    if n == 0 || !(sigma > 0.0) {
        return values.to_vec();
    }
    let half = ((4.0 * sigma).ceil() as usize).min(n.saturating_sub(1));
    let weights: Vec<f64> = (0..=half).map(|k| (-0.5 * (k as f64 / sigma).powi(2)).exp()).collect();
    let reflect = |j: isize| -> usize {
        let n = n as isize;
        let mut j = j;
        // reflection about the end nodes
        loop {
            if j < 0 {
                j = -j;
            } else if j >= n {
                j = 2 * (n - 1) - j;
            } else {
                return j as usize;
            }
        }
    };
    (0..n as isize)
        .map(|i| {
            let mut acc = weights[0] * values[i as usize];
            let mut wsum = weights[0];
            for (k, &w) in weights.iter().enumerate().skip(1) {
                let k = k as isize;
                acc += w * (values[reflect(i - k)] + values[reflect(i + k)]);
                wsum += 2.0 * w;
            }
            acc / wsum
        })
        .collect()
}

/// Convenience for tests and examples: constant envelope on a domain.
pub fn constant_bounds(lower: f64, upper: f64, domain: &Domain) -> Result<BoundFields> {
    BoundFields::constant(lower, upper, domain.clone())
}
