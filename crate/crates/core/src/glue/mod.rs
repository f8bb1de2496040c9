//! Gluing data from solutions, and the reconstruction of solutions from it.
//!
//! For a solution `ŵ`, a transversal curve `y = Y(x)` in the plane `z = 0`
//! and a circle sample `λ` with `μ = (λ1:λ2:λ3:λ)`, the characteristic ODE
//!
//! ```text
//! dz/dx = A·wx/(μ·C·wz) − B·wy·Y′/((μ−1)·C·wz),   evaluated at (x, Y(x), z)
//! ```
//!
//! is shot from `(x, z) = (t, 0)` back to `x = 0`; the landing value is
//! `g(λ, t) = z(0)`. Reconstruction solves the Riemann problem of `g` and
//! undoes the gauge and the `y`-reparameterization fixed by the curve.

use alloc::string::String;

use thiserror::Error;

use crate::ode::{OdeError, OdeOptions};
use crate::pde::PdeError;
use crate::riemann::SolveError;
use crate::C;

mod build;
mod curve;
mod sampled;

pub use build::{
    apply_psi, characteristic_shot, check_transversality, finish_table, glue_row, glue_sample, preimage_points,
    reconstruct, ConditionReport, ReconstructedField,
};
pub use curve::{CurveKind, TransversalCurve};
pub use sampled::{chebyshev_derivative, clenshaw, SampledGluing};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GlueError {
    #[error("cross-ratio μ = {mu} at circle sample {sample} is within ε₁ of 0 or 1")]
    MuTooCloseToPole { sample: usize, mu: C },
    #[error("characteristic ODE failed: {0}")]
    OdeStepFailure(OdeError),
    #[error("w_z nearly vanishes at x = {x}")]
    NondegeneracyLost { x: C },
    #[error("w_y nearly vanishes at x = {x} while tracing the canonical curve")]
    DerivativeBlowup { x: C },
    #[error("x = {x} lies outside the curve domain")]
    LeftDomain { x: C },
    #[error("y = {y} lies outside the image of the curve")]
    InverseOutOfRange { y: C },
    #[error("Chebyshev fit misses held-out shots by {residual:e}")]
    FitInaccurate { residual: f64 },
    #[error("invalid gluing data: {0}")]
    InvalidData(String),
    #[error("λ1, λ2 must lie inside and λ3 outside the unit circle")]
    LambdaPlacement,
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl From<OdeError> for GlueError {
    fn from(e: OdeError) -> Self {
        GlueError::OdeStepFailure(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlueOptions {
    /// Circle samples are `2·half_order` roots of unity.
    pub half_order: usize,
    /// Fit interval `[−t_max, t_max]`, also the `t`-disk radius of the result.
    pub t_max: f64,
    /// Number of Chebyshev nodes; `g/t` is fitted with degree `degree − 1`.
    /// Must be even so that no node sits at `t = 0`.
    pub degree: usize,
    /// Minimal distance of `μ` from the poles `0` and `1`.
    pub epsilon1: f64,
    /// Largest accepted relative miss at held-out shots.
    pub max_fit_residual: f64,
    pub ode: OdeOptions,
}

impl Default for GlueOptions {
    fn default() -> Self {
        Self {
            half_order: crate::annulus::DEFAULT_HALF_ORDER,
            t_max: 10.0,
            degree: 12,
            epsilon1: 0.05,
            max_fit_residual: 1e-8,
            ode: OdeOptions::default(),
        }
    }
}
