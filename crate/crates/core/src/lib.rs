//! Principal eigenvalues of the fully nonlinear operator
//! `F(x, M) = ½ M⁺_{θ(x),Θ(x)}(M)` and of the linear operators `L^c`, the
//! robust min-max identities that connect them, and Monte Carlo checks of the
//! robust growth-optimal strategy `π*_t = e^{λ* t} ∇η*(X_t)`.
//!
//! Module map:
//! - [`matrix`], [`pucci`]: symmetric matrices, Pucci operators, `F`.
//! - [`domain`], [`fields`]: intervals and balls, grids, exhaustions, the
//!   envelope `(θ, Θ)` and admissible covariance fields.
//! - [`eigen`]: inverse power iteration with Howard policy iteration.
//! - [`robust`]: min-max verification, the near-optimal covariance
//!   selection and exhaustion limits.
//! - [`sim`]: path simulation, wealth processes, growth rates.
//! - [`runner`]: config parsing, orchestration and output files.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod domain;
pub mod eigen;
pub mod error;
pub mod fields;
pub mod matrix;
pub mod pucci;
pub mod robust;
pub mod runner;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
