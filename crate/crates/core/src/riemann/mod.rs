//! The nonlinear Riemann problem on the unit circle.
//!
//! Find `σ₊` holomorphic in the disk and `σ₋` holomorphic outside it (finite
//! at infinity) with `σ₋(λ) = g(λ, σ₊(λ))` on the circle. The transform of
//! `g` is `σ₊(0)`. When `g` is a wave gluing function scaffolded with
//! boundary values `(x, y, z)`, the transform is the solution `w(x, y, z)` of
//! the (A,B,C)-equation.

use thiserror::Error;

use crate::annulus::{CircleFunction, IndexConfig, KernelError, DEFAULT_HALF_ORDER};
use crate::scaffold::ScaffoldError;
use crate::C;

mod gluing;
mod homotopy;
mod newton;
mod wave;

pub use gluing::{check_dt_consistency, FnGluing, GluingFunction, MobiusShifted, PolynomialGluing};
pub use homotopy::{integrate_homotopy, solve_riemann_homotopy, GluingPath, OffsetPath, PathSlice, ScaffoldPath};
pub use newton::solve_riemann_newton;
pub use wave::{
    assemble_wave_field, check_wave_gluing, solve_strip, wave_point, wave_solution, wave_strips, Hole, HoleCode,
    WaveField,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub half_order: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub homotopy_steps: usize,
    pub index: IndexConfig,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            half_order: DEFAULT_HALF_ORDER,
            tol: 1e-12,
            max_iters: 50,
            homotopy_steps: 64,
            index: IndexConfig::default(),
        }
    }
}

/// Which solver produces the section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Newton,
    Homotopy,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("∂g/∂t along the section has winding index {0}, expected 1")]
    IndexNotOne(i64),
    #[error("Newton iteration stalled after {iters} steps with residual {residual:e}")]
    MaxItersExceeded { iters: usize, residual: f64 },
    #[error("section left the t-disk: modulus {modulus:e} at sample {sample}, radius {delta:e}")]
    LeftTDisk { sample: usize, modulus: f64, delta: f64 },
    #[error("spectral tail holds {ratio:e} of the coefficient mass; increase N")]
    SpectralTailTooFat { ratio: f64 },
    #[error("homotopy path left its validity region at κ = {kappa}: {source}")]
    PathLeftValidityRegion { kappa: f64, source: KernelError },
    #[error("∂g/∂t changed winding index to {index} at κ = {kappa} along the homotopy")]
    PathIndexChanged { kappa: f64, index: i64 },
    #[error("homotopy start is not solved by σ = 0 (residual {residual:e})")]
    PathStartNotSolved { residual: f64 },
    #[error("gluing function must satisfy g(λ, 0) = 0")]
    NotZeroPreserving,
    #[error("wave gluing function needs index {expected} at t = 0, found {got}")]
    IndexPrecondition { expected: i64, got: i64 },
    #[error("non-finite values in the iteration")]
    NonFinite,
    #[error(transparent)]
    Kernel(KernelError),
    #[error(transparent)]
    Scaffold(#[from] ScaffoldError),
}

impl From<KernelError> for SolveError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::TArgumentOutOfDisk {
                sample,
                modulus,
                delta,
            } => SolveError::LeftTDisk {
                sample,
                modulus,
                delta,
            },
            KernelError::SpectralTailTooFat { ratio } => SolveError::SpectralTailTooFat { ratio },
            other => SolveError::Kernel(other),
        }
    }
}

/// A solved Riemann problem.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannSolution {
    pub sigma_plus: CircleFunction,
    pub sigma_minus: CircleFunction,
    /// `max |g(λ, σ₊) − σ₋|` over the circle samples.
    pub residual_norm: f64,
    pub newton_iters: usize,
}

impl RiemannSolution {
    /// `σ₊(0)`.
    pub fn transform_value(&self) -> C {
        self.sigma_plus.mode(0)
    }
}

/// `σ₊(0)` for the solution of the Riemann problem of `g`.
///
/// The homotopy method deforms `g(λ, t) − (1 − κ)·g(λ, 0)` from `κ = 0`.
pub fn riemann_transform(g: &dyn GluingFunction, method: Method, opts: &SolverOptions) -> Result<C, SolveError> {
    let sol = match method {
        Method::Newton => solve_riemann_newton(g, opts, None)?,
        Method::Homotopy => solve_riemann_homotopy(&OffsetPath::new(g), opts)?,
    };
    Ok(sol.transform_value())
}
