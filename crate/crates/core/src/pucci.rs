//! Pucci extremal operators and the nonlinear operator `F(x, M) = ½ M⁺_{θ(x),Θ(x)}(M)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::BoundFields;
use crate::matrix::{eig_sym, SymmetricMatrix};

/// Ellipticity constants `0 < lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticityPair {
    lo: f64,
    hi: f64,
}

impl EllipticityPair {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(Error::input(format!(
                "ellipticity pair ({lo}, {hi}) must satisfy 0 < lo <= hi"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Coefficient attaining `sup_{a ∈ [lo, hi]} a·e`; ties at `e = 0` go to `hi`.
#[inline]
pub fn optimal_weight(e: f64, lo: f64, hi: f64) -> f64 {
    if e >= 0.0 {
        hi
    } else {
        lo
    }
}

/// `M⁺` on an eigenvalue list.
#[inline]
pub fn pucci_plus_eigenvalues(eigs: &[f64], lo: f64, hi: f64) -> f64 {
    eigs.iter().map(|&e| optimal_weight(e, lo, hi) * e).sum()
}

/// `M⁻` on an eigenvalue list.
#[inline]
pub fn pucci_minus_eigenvalues(eigs: &[f64], lo: f64, hi: f64) -> f64 {
    eigs.iter().map(|&e| if e > 0.0 { lo * e } else { hi * e }).sum()
}

/// `Λ Σ_{e_i>0} e_i + λ Σ_{e_i<0} e_i`.
pub fn pucci_plus(m: &SymmetricMatrix, b: EllipticityPair) -> Result<f64> {
    let s = eig_sym(m)?;
    Ok(pucci_plus_eigenvalues(&s.values, b.lo, b.hi))
}

/// `λ Σ_{e_i>0} e_i + Λ Σ_{e_i<0} e_i`.
pub fn pucci_minus(m: &SymmetricMatrix, b: EllipticityPair) -> Result<f64> {
    let s = eig_sym(m)?;
    Ok(pucci_minus_eigenvalues(&s.values, b.lo, b.hi))
}

/// `F(x, M) = ½ M⁺_{θ(x),Θ(x)}(M)`.
pub fn eval_f(x: &[f64], m: &SymmetricMatrix, bounds: &BoundFields) -> Result<f64> {
    let pair = bounds.pair_at_point(x)?;
    check_dim(m, bounds)?;
    Ok(0.5 * pucci_plus(m, pair)?)
}

/// The matrix `A ∈ A(θ(x), Θ(x))` with `Tr(A M) = M⁺_{θ(x),Θ(x)}(M)`.
pub fn optimal_coefficient(x: &[f64], m: &SymmetricMatrix, bounds: &BoundFields) -> Result<SymmetricMatrix> {
    let pair = bounds.pair_at_point(x)?;
    check_dim(m, bounds)?;
    optimal_coefficient_for(m, pair)
}

/// Same as [`optimal_coefficient`] with explicit constants.
pub fn optimal_coefficient_for(m: &SymmetricMatrix, b: EllipticityPair) -> Result<SymmetricMatrix> {
    let s = eig_sym(m)?;
    let weights: Vec<f64> = s.values.iter().map(|&e| optimal_weight(e, b.lo, b.hi)).collect();
    SymmetricMatrix::from_spectrum(&weights, &s.vectors)
}

fn check_dim(m: &SymmetricMatrix, bounds: &BoundFields) -> Result<()> {
    if m.dim() != bounds.region.dim() {
        return Err(Error::input(format!(
            "matrix is {0}x{0} but the domain has dimension {1}",
            m.dim(),
            bounds.region.dim()
        )));
    }
    Ok(())
}
