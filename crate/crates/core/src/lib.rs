//! Numerical twistor pipeline for the nonlinear wave equation
//!
//! ```text
//! A·wx·wyz + B·wy·wxz + C·wz·wxy = 0,    A + B + C = 0
//! ```
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerics:
//!
//! * [`annulus`]: truncated Laurent series on the unit circle, the additive
//!   splitting `φ = λ·ℍ₊φ + ℍ₋φ`, winding indices and Birkhoff factorization.
//! * [`scaffold`]: Lagrange interpolation factors that inject boundary values
//!   `(x, y, z)` into a base gluing function.
//! * [`riemann`]: the nonlinear Riemann problem `σ₋(λ) = g(λ, σ₊(λ))`, solved
//!   by Newton iteration and by a homotopy ODE, and the grid assembly
//!   `w(x, y, z) = σ₊(0)` of solutions of the wave equation.
//! * [`pde`]: the equation itself, its residual operators, cross-ratios and
//!   test solutions.
//! * [`glue`]: the inverse direction, gluing data extracted from a solution
//!   by shooting along characteristic curves, and the reconstruction.
//! * [`backlund`]: the first-order transform carrying solutions of one
//!   (A,B,C)-equation to another.
//! * [`ode`]: an adaptive Dormand–Prince integrator for complex states along
//!   straight segments of the complex plane.
//!
//! IO, file formats, parallel sweeps and the command line live in the
//! companion `twistorsolve` crate.
#![no_std]
#![warn(missing_debug_implementations)]
// Negated float comparisons are how NaN inputs fail validation checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod annulus;
pub mod backlund;
mod fft;
pub mod glue;
pub mod ode;
pub mod pde;
pub mod riemann;
pub mod scaffold;

pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub(crate) type C = Complex64;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::C;

    pub fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    pub fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }
}
