//! Gluing functions `g(λ, t)`, holomorphic on an annulus around the unit
//! circle times a disk `|t| < δ`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::C;

/// A gluing function together with its `t`-derivative.
pub trait GluingFunction: Send + Sync {
    fn eval(&self, lambda: C, t: C) -> C;
    fn dt(&self, lambda: C, t: C) -> C;
    /// Radius of the `t`-disk.
    fn delta(&self) -> f64;
    /// `g` is holomorphic on `ε < |λ| < 1/ε`. Only recorded, never enforced
    /// since the solvers sample the unit circle alone.
    fn epsilon(&self) -> f64 {
        0.5
    }
    /// Whether `(λ, t)` lies in the domain. Defaults to `|t| < δ`.
    fn admits(&self, _lambda: C, t: C) -> bool {
        t.norm() < self.delta()
    }
    /// `g(λ, 0) ≡ 0`.
    fn zero_preserving(&self) -> bool {
        false
    }
    /// Tabulated gluing functions are defined on a fixed set of circle
    /// samples only.
    fn sample_count(&self) -> Option<usize> {
        None
    }
}

/// `g(λ, t) = λ^p · Σ_{k≥1} c_k t^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialGluing {
    power: i32,
    coeffs: Vec<C>,
    delta: f64,
}

impl PolynomialGluing {
    /// `coeffs` lists `c_1, c_2, …`.
    pub fn new(power: i32, coeffs: impl IntoIterator<Item = C>, delta: f64) -> Self {
        Self {
            power,
            coeffs: coeffs.into_iter().collect(),
            delta,
        }
    }

    /// `(Σ c_k t^k, Σ k c_k t^(k−1))`
    fn poly(&self, t: C) -> (C, C) {
        let mut v = C::new(0.0, 0.0);
        let mut d = C::new(0.0, 0.0);
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            v = v * t + c;
            d = d * t + c * (k as f64 + 1.0);
        }
        (v * t, d)
    }
}

impl GluingFunction for PolynomialGluing {
    fn eval(&self, lambda: C, t: C) -> C {
        lambda.powi(self.power) * self.poly(t).0
    }
    fn dt(&self, lambda: C, t: C) -> C {
        lambda.powi(self.power) * self.poly(t).1
    }
    fn delta(&self) -> f64 {
        self.delta
    }
    fn zero_preserving(&self) -> bool {
        true
    }
}

/// A gluing function given by closures.
pub struct FnGluing<F, D> {
    eval: F,
    dt: D,
    delta: f64,
    zero_preserving: bool,
}

impl<F, D> core::fmt::Debug for FnGluing<F, D> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FnGluing").field("delta", &self.delta).finish_non_exhaustive()
    }
}

impl<F, D> FnGluing<F, D>
where
    F: Fn(C, C) -> C + Send + Sync,
    D: Fn(C, C) -> C + Send + Sync,
{
    pub fn new(eval: F, dt: D, delta: f64) -> Self {
        Self {
            eval,
            dt,
            delta,
            zero_preserving: false,
        }
    }

    pub fn zero_preserving(mut self) -> Self {
        self.zero_preserving = true;
        self
    }
}

impl<F, D> GluingFunction for FnGluing<F, D>
where
    F: Fn(C, C) -> C + Send + Sync,
    D: Fn(C, C) -> C + Send + Sync,
{
    fn eval(&self, lambda: C, t: C) -> C {
        (self.eval)(lambda, t)
    }
    fn dt(&self, lambda: C, t: C) -> C {
        (self.dt)(lambda, t)
    }
    fn delta(&self) -> f64 {
        self.delta
    }
    fn zero_preserving(&self) -> bool {
        self.zero_preserving
    }
}

/// `g(m(λ), t)` with the disk automorphism `m(λ) = (λ − μ)/(μ̄λ − 1)`,
/// `|μ| < 1`. The transform of the composed problem equals `σ₊(μ)` of the
/// original one.
pub struct MobiusShifted<'g> {
    base: &'g dyn GluingFunction,
    mu: C,
}

impl core::fmt::Debug for MobiusShifted<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MobiusShifted").field("mu", &self.mu).finish_non_exhaustive()
    }
}

impl<'g> MobiusShifted<'g> {
    /// `None` unless `|μ| < 1`.
    pub fn new(base: &'g dyn GluingFunction, mu: C) -> Option<Self> {
        (mu.norm() < 1.0).then_some(Self { base, mu })
    }

    pub fn map(&self, lambda: C) -> C {
        (lambda - self.mu) / (self.mu.conj() * lambda - 1.0)
    }
}

impl GluingFunction for MobiusShifted<'_> {
    fn eval(&self, lambda: C, t: C) -> C {
        self.base.eval(self.map(lambda), t)
    }
    fn dt(&self, lambda: C, t: C) -> C {
        self.base.dt(self.map(lambda), t)
    }
    fn delta(&self) -> f64 {
        self.base.delta()
    }
    fn admits(&self, lambda: C, t: C) -> bool {
        self.base.admits(self.map(lambda), t)
    }
    fn zero_preserving(&self) -> bool {
        self.base.zero_preserving()
    }
}

/// Largest relative mismatch between `dt` and a central difference of
/// `eval` in `t` with step `h`, over the probe points.
pub fn check_dt_consistency(g: &dyn GluingFunction, probes: &[(C, C)], h: f64) -> f64 {
    probes
        .iter()
        .map(|&(l, t)| {
            let fd = (g.eval(l, t + h) - g.eval(l, t - h)) / (2.0 * h);
            let d = g.dt(l, t);
            (d - fd).norm() / (1.0 + d.norm())
        })
        .fold(0.0, f64::max)
}
