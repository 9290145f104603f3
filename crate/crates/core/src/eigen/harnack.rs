use serde::Serialize;

use crate::domain::Grid;
use crate::error::{Error, Result};

use super::EigenPair;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnackReport {
    /// `max` over the family of `sup_K η / inf_K η`.
    pub ratio: f64,
    pub per_pair: Vec<f64>,
    pub fraction: f64,
}

/// Interior Harnack ratio over the central compact `K`: the middle
/// `fraction` of an interval, or the ball of radius `fraction · R`.
pub fn harnack_ratio(pairs: &[EigenPair], grid: &Grid, fraction: f64) -> Result<HarnackReport> {
    if pairs.is_empty() {
        return Err(Error::input("Harnack ratio needs at least one eigenfunction"));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::input("K must be a proper central fraction in (0, 1)"));
    }
    let (lo, hi) = grid.domain().coordinate_range();
    let (k_lo, k_hi) = if grid.is_ball() {
        (0.0, fraction * hi)
    } else {
        let c = 0.5 * (lo + hi);
        let half = 0.5 * fraction * (hi - lo);
        (c - half, c + half)
    };
    let per_pair = pairs
        .iter()
        .map(|p| {
            if p.eta.len() != grid.len() {
                return Err(Error::input("eigenfunctions must share the grid"));
            }
            let inside = grid
                .nodes()
                .iter()
                .zip(&p.eta)
                .filter(|(&s, _)| s >= k_lo && s <= k_hi)
                .map(|(_, &v)| v);
            let ends = [k_lo, k_hi].map(|s| grid.interpolate(&p.eta, s).expect("K is interior"));
            let (mut sup, mut inf) = (f64::NEG_INFINITY, f64::INFINITY);
            for v in inside.chain(ends) {
                sup = sup.max(v);
                inf = inf.min(v);
            }
            if !(inf > 0.0) {
                return Err(Error::input("eigenfunction is not positive on K"));
            }
            Ok(sup / inf)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HarnackReport {
        ratio: per_pair.iter().copied().fold(0.0, f64::max),
        per_pair,
        fraction,
    })
}
