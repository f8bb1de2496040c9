//! Gluing functions tabulated on the circle samples.
//!
//! At circle sample `λ_j` the function is `g(λ_j, t) = t · Σ_k c_jk T_k(t/t_max)`
//! with Chebyshev polynomials `T_k`. Fitting `g/t` rather than `g` makes
//! `g(λ, 0) = 0` exact.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::GlueError;
use crate::annulus::node;
use crate::pde::LambdaTriple;
use crate::riemann::GluingFunction;
use crate::C;

/// Tolerance for matching a query `λ` to a circle sample.
const SAMPLE_MATCH: f64 = 1e-9;

/// `Σ c_k T_k(u)` by Clenshaw's recurrence.
pub fn clenshaw(coeffs: &[C], u: C) -> C {
    let mut b1 = C::new(0.0, 0.0);
    let mut b2 = C::new(0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + u * b1 * 2.0 - b2;
        b2 = b1;
        b1 = b0;
    }
    match coeffs.first() {
        Some(&c0) => c0 + u * b1 - b2,
        None => C::new(0.0, 0.0),
    }
}

/// Coefficients of the derivative in `u` of `Σ c_k T_k(u)`.
pub fn chebyshev_derivative(coeffs: &[C]) -> Vec<C> {
    let n = coeffs.len();
    if n <= 1 {
        return alloc::vec![C::new(0.0, 0.0)];
    }
    let mut d = alloc::vec![C::new(0.0, 0.0); n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + coeffs[k] * (2.0 * k as f64);
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

/// A gluing function known at the `M` circle samples only.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGluing {
    lambdas: LambdaTriple,
    lambda_samples: Vec<C>,
    coeffs: Vec<Vec<C>>,
    dcoeffs: Vec<Vec<C>>,
    t_max: f64,
    fit_residual: f64,
    curve: String,
}

impl SampledGluing {
    /// Validates that the samples are the `M` roots of unity in order and
    /// that every sample carries a coefficient row of the same length.
    pub fn new(
        lambdas: LambdaTriple,
        lambda_samples: Vec<C>,
        coeffs: Vec<Vec<C>>,
        t_max: f64,
        fit_residual: f64,
        curve: String,
    ) -> Result<Self, GlueError> {
        let m = lambda_samples.len();
        if m < 2 || !m.is_multiple_of(2) {
            return Err(GlueError::InvalidData(format!("{m} circle samples, need a positive even count")));
        }
        for (j, &l) in lambda_samples.iter().enumerate() {
            if (l - node(m / 2, j)).norm() > SAMPLE_MATCH {
                return Err(GlueError::InvalidData(format!("sample {j} is not the root of unity e^(2πi·{j}/{m})")));
            }
        }
        if coeffs.len() != m {
            return Err(GlueError::InvalidData(format!("{} coefficient rows for {m} samples", coeffs.len())));
        }
        let degree = coeffs.first().map_or(0, Vec::len);
        if degree == 0 || coeffs.iter().any(|r| r.len() != degree) {
            return Err(GlueError::InvalidData("coefficient rows must be nonempty and of equal length".into()));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(GlueError::InvalidData(format!("t_max must be positive, got {t_max}")));
        }
        let dcoeffs = coeffs.iter().map(|r| chebyshev_derivative(r)).collect();
        Ok(Self {
            lambdas,
            lambda_samples,
            coeffs,
            dcoeffs,
            t_max,
            fit_residual,
            curve,
        })
    }

    pub fn lambdas(&self) -> &LambdaTriple {
        &self.lambdas
    }

    pub fn lambda_samples(&self) -> &[C] {
        &self.lambda_samples
    }

    pub fn coeffs(&self) -> &[Vec<C>] {
        &self.coeffs
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn fit_residual(&self) -> f64 {
        self.fit_residual
    }

    /// Description of the transversal curve the data was built with.
    pub fn curve(&self) -> &str {
        &self.curve
    }

    /// Index of the circle sample at `λ`, if any.
    pub fn sample_index(&self, lambda: C) -> Option<usize> {
        let m = self.lambda_samples.len();
        let turns = lambda.arg() / (2.0 * PI) * m as f64;
        let j = (turns.round() as i64).rem_euclid(m as i64) as usize;
        ((lambda - self.lambda_samples[j]).norm() < SAMPLE_MATCH).then_some(j)
    }

    /// `g(λ_j, t)` at sample `j`.
    pub fn eval_sample(&self, j: usize, t: C) -> C {
        t * clenshaw(&self.coeffs[j], t / self.t_max)
    }

    /// `∂g/∂t(λ_j, t)` at sample `j`.
    pub fn dt_sample(&self, j: usize, t: C) -> C {
        let u = t / self.t_max;
        clenshaw(&self.coeffs[j], u) + t * clenshaw(&self.dcoeffs[j], u) / self.t_max
    }
}

fn nan() -> C {
    C::new(f64::NAN, f64::NAN)
}

impl GluingFunction for SampledGluing {
    fn eval(&self, lambda: C, t: C) -> C {
        self.sample_index(lambda).map_or_else(nan, |j| self.eval_sample(j, t))
    }
    fn dt(&self, lambda: C, t: C) -> C {
        self.sample_index(lambda).map_or_else(nan, |j| self.dt_sample(j, t))
    }
    fn delta(&self) -> f64 {
        self.t_max
    }
    fn zero_preserving(&self) -> bool {
        true
    }
    fn sample_count(&self) -> Option<usize> {
        Some(self.lambda_samples.len())
    }
}
