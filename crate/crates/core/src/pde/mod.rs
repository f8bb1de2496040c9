//! The (A,B,C)-equation `A·wx·wyz + B·wy·wxz + C·wz·wxy = 0`.
//!
//! Coefficient algebra and spectral parameters live in [`abc`], sampled fields
//! and finite differences in [`field`], solution oracles and fixtures in
//! [`oracle`], and the residual operators in [`residual`].

use alloc::string::String;

use thiserror::Error;

pub mod abc;
pub mod field;
pub mod oracle;
pub mod residual;

pub use abc::{
    abc_from_lambda_triple, cross_ratio, lambda4_from_abc, ABCTriple, LambdaQuadruple,
    LambdaTriple, ProjectivePoint,
};
pub use field::{FieldDerivatives, Grid3, ScalarField3};
pub use oracle::{
    fixture, gauge_transform, GridOracle, Linear, Map1, Profile, Provenance, Reparameterized, SolutionOracle,
    TravelingWave,
};
pub use residual::{
    equation_residual, equation_residual_at, frobenius_residual, linearization_residual,
    principal_symbol, veronese_p, ResidualField,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PdeError {
    #[error("spectral parameters must be distinct, finite and nonzero")]
    DegenerateLambdas,
    #[error("coefficients must be nonzero with A+B+C = 0 (sum has modulus {sum:e})")]
    InvalidTriple { sum: f64 },
    #[error("cross-ratio needs pairwise distinct points")]
    CoincidentPoints,
    #[error("cross-ratio value -A/C must avoid 0, 1 and ∞")]
    RatioDegenerate,
    #[error("finite differences need at least 3 points per axis, grid has {0:?}")]
    GridTooSmall([usize; 3]),
    #[error("spectral parameters must avoid 0 and ∞")]
    LambdaContainsZeroOrInfinity,
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("grid spacings must be positive and every axis must hold at least one point")]
    InvalidGrid,
    #[error("expected {expected} field values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("oracle does not provide second derivatives")]
    MissingSecondDerivatives,
}
