//! Analytic functions on the unit circle and the Riemann splitting operators.
//!
//! A [`CircleFunction`] with half-order `N` is stored both as its `2N` samples
//! at `λ_j = exp(2πi·j/2N)` and as the Laurent coefficients `c_k`,
//! `k ∈ [-N, N-1]`. All work happens on `|λ| = 1`; the functions are
//! understood to extend analytically to an annulus `ε < |λ| < 1/ε`.
//!
//! Operators:
//!
//! * [`h_split`]: `φ = λ·ℍ₊φ + ℍ₋φ` with `ℍ₊φ` analytic inside and `ℍ₋φ`
//!   analytic outside (bounded at ∞).
//! * [`winding_index`]: the integer winding of a nonvanishing function.
//! * [`mult_split`]: `φ = 𝕄₊φ / 𝕄₋φ`, normalized by `𝕄₊φ(0) = 1`.
//! * [`birkhoff_factor`]: `φ = λⁿ·a₊/a₋` with `n` the winding index.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::ops::{Add, Mul, Neg, Sub};

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::fft::dft_in_place;
use crate::riemann::GluingFunction;
use crate::C;

/// Default truncation half-order (64 circle samples).
pub const DEFAULT_HALF_ORDER: usize = 32;

/// Smallest admissible modulus of a function whose winding index is taken.
pub const INDEX_FLOOR: f64 = 1e-10;

/// Largest admissible phase increment between adjacent samples.
pub const MAX_PHASE_JUMP: f64 = FRAC_PI_2;

/// Fraction of the mode range (by `|k|`) treated as the spectral tail.
pub const TAIL_FRACTION: f64 = 0.25;

/// Largest admissible tail mass relative to the total coefficient mass.
pub const TAIL_THRESHOLD: f64 = 1e-10;

/// Thresholds for winding-number computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexConfig {
    /// Samples with modulus below this value are rejected.
    pub floor: f64,
    /// Adjacent-sample phase increments must stay below this value.
    pub max_jump: f64,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            floor: INDEX_FLOOR,
            max_jump: MAX_PHASE_JUMP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("function modulus {value:e} at circle sample {sample} is below the index floor")]
    NearZeroOnCircle { sample: usize, value: f64 },
    #[error("phase jump {jump:.3} after circle sample {sample} is too large; sampling too coarse")]
    PhaseJumpTooLarge { sample: usize, jump: f64 },
    #[error("winding index is {0}; the multiplicative splitting needs index 0")]
    NonzeroIndex(i64),
    #[error("spectral tail holds {ratio:e} of the coefficient mass")]
    SpectralTailTooFat { ratio: f64 },
    #[error("t argument of modulus {modulus:e} at circle sample {sample} leaves the disk |t| < {delta:e}")]
    TArgumentOutOfDisk {
        sample: usize,
        modulus: f64,
        delta: f64,
    },
    #[error("gluing function is tabulated on {expected} circle samples, got {got}")]
    SampleCountMismatch { expected: usize, got: usize },
}

/// Circle sample `j` out of `2·half_order`.
pub fn node(half_order: usize, j: usize) -> C {
    let m = 2 * half_order;
    C::from_polar(1.0, 2.0 * PI * (j % m) as f64 / m as f64)
}

/// All `2·half_order` circle samples.
pub fn nodes(half_order: usize) -> Vec<C> {
    (0..2 * half_order).map(|j| node(half_order, j)).collect()
}

/// Truncated Laurent series on the unit circle.
///
/// Samples and modes are kept in sync by every constructor. Coefficients are
/// stored in DFT order (`k mod 2N`); use [`CircleFunction::mode`] or
/// [`CircleFunction::modes`] to read them by signed index.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFunction {
    half_order: usize,
    samples: Vec<C>,
    modes: Vec<C>,
}

impl CircleFunction {
    /// Builds from `2·half_order` samples.
    ///
    /// # Panics
    ///
    /// If the sample count is not `2·half_order` or `half_order` is zero.
    pub fn from_samples(half_order: usize, samples: Vec<C>) -> Self {
        assert!(half_order > 0, "half order must be positive");
        assert_eq!(samples.len(), 2 * half_order, "sample count must be 2N");
        let mut modes = samples.clone();
        dft_in_place(&mut modes, false);
        let scale = 1.0 / modes.len() as f64;
        for c in modes.iter_mut() {
            *c *= scale;
        }
        Self {
            half_order,
            samples,
            modes,
        }
    }

    /// Builds from coefficients in DFT order.
    fn from_dft_modes(half_order: usize, modes: Vec<C>) -> Self {
        let mut samples = modes.clone();
        dft_in_place(&mut samples, true);
        Self {
            half_order,
            samples,
            modes,
        }
    }

    /// Builds from `(k, c_k)` pairs; unspecified modes are zero and repeated
    /// indices accumulate.
    ///
    /// # Panics
    ///
    /// If some `k` lies outside `[-N, N-1]`.
    pub fn from_modes<I>(half_order: usize, modes: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
    {
        assert!(half_order > 0, "half order must be positive");
        let n = half_order as i64;
        let mut buf = alloc::vec![C::new(0.0, 0.0); 2 * half_order];
        for (k, c) in modes {
            assert!((-n..n).contains(&k), "mode {k} outside [-{n}, {n})");
            buf[k.rem_euclid(2 * n) as usize] += c;
        }
        Self::from_dft_modes(half_order, buf)
    }

    /// Samples `f` at the circle nodes.
    pub fn from_fn(half_order: usize, f: impl Fn(C) -> C) -> Self {
        Self::from_samples(half_order, nodes(half_order).into_iter().map(f).collect())
    }

    pub fn zero(half_order: usize) -> Self {
        Self::constant(half_order, C::new(0.0, 0.0))
    }

    pub fn constant(half_order: usize, value: C) -> Self {
        Self::from_modes(half_order, [(0, value)])
    }

    /// `c·λᵏ`.
    pub fn monomial(half_order: usize, k: i64, c: C) -> Self {
        Self::from_modes(half_order, [(k, c)])
    }

    pub fn half_order(&self) -> usize {
        self.half_order
    }

    /// Number of circle samples, `2N`.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[C] {
        &self.samples
    }

    /// Coefficient of `λᵏ`; zero outside the stored range.
    pub fn mode(&self, k: i64) -> C {
        let n = self.half_order as i64;
        if !(-n..n).contains(&k) {
            return C::new(0.0, 0.0);
        }
        self.modes[k.rem_euclid(2 * n) as usize]
    }

    /// `(k, c_k)` for `k = -N, …, N-1`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, C)> + '_ {
        let n = self.half_order as i64;
        (-n..n).map(move |k| (k, self.mode(k)))
    }

    /// Evaluates the Laurent series at an arbitrary `λ ≠ 0`.
    pub fn eval(&self, lambda: C) -> C {
        let n = self.half_order as i64;
        // Horner in λ for k ≥ 0 and in 1/λ for k < 0.
        let mut pos = C::new(0.0, 0.0);
        for k in (0..n).rev() {
            pos = pos * lambda + self.mode(k);
        }
        if (-n..0).all(|k| self.mode(k) == C::new(0.0, 0.0)) {
            return pos;
        }
        let inv = lambda.inv();
        let mut neg = C::new(0.0, 0.0);
        for k in (1..=n).rev() {
            neg = (neg + self.mode(-k)) * inv;
        }
        pos + neg
    }

    /// Applies `f` sample-wise.
    pub fn map(&self, f: impl Fn(C) -> C) -> Self {
        Self::from_samples(self.half_order, self.samples.iter().map(|&s| f(s)).collect())
    }

    /// Combines two functions sample-wise.
    ///
    /// # Panics
    ///
    /// If the half orders differ.
    pub fn zip_with(&self, other: &Self, f: impl Fn(C, C) -> C) -> Self {
        assert_eq!(self.half_order, other.half_order, "half orders differ");
        Self::from_samples(
            self.half_order,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, c: C) -> Self {
        Self::from_dft_modes(self.half_order, self.modes.iter().map(|&m| m * c).collect())
    }

    pub fn exp(&self) -> Self {
        self.map(|s| s.exp())
    }

    /// Multiplies by `λᵏ` as a cyclic shift of the coefficients, which equals
    /// the sample-wise product on the nodes.
    pub fn shift(&self, k: i64) -> Self {
        let m = self.modes.len() as i64;
        let mut buf = alloc::vec![C::new(0.0, 0.0); self.modes.len()];
        for (i, &c) in self.modes.iter().enumerate() {
            buf[(i as i64 + k).rem_euclid(m) as usize] = c;
        }
        Self::from_dft_modes(self.half_order, buf)
    }

    /// Keeps the modes `k ≥ 0`.
    pub fn nonnegative_part(&self) -> Self {
        Self::from_modes(self.half_order, self.modes().filter(|&(k, _)| k >= 0))
    }

    /// Keeps the modes `k ≤ 0`.
    pub fn nonpositive_part(&self) -> Self {
        Self::from_modes(self.half_order, self.modes().filter(|&(k, _)| k <= 0))
    }

    /// Largest sample modulus.
    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// Smallest sample modulus together with its index.
    pub fn min_abs(&self) -> (usize, f64) {
        self.samples
            .iter()
            .map(|s| s.norm())
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (j, v)| if v < acc.1 { (j, v) } else { acc })
    }

    /// `(tail, total)`: the mass of the coefficients with
    /// `|k| > (1 - TAIL_FRACTION)·N` and the total coefficient mass.
    pub fn tail_mass(&self) -> (f64, f64) {
        let cutoff = ((1.0 - TAIL_FRACTION) * self.half_order as f64).floor() as i64;
        let (mut tail, mut total) = (0.0, 0.0);
        for (k, c) in self.modes() {
            let a = c.norm();
            total += a;
            if k.abs() > cutoff {
                tail += a;
            }
        }
        (tail, total)
    }

    /// Tail mass relative to the total coefficient mass; zero for the zero
    /// function.
    pub fn tail_ratio(&self) -> f64 {
        let (tail, total) = self.tail_mass();
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    /// Errors with [`KernelError::SpectralTailTooFat`] when the truncation is
    /// inadequate.
    pub fn check_tail(&self) -> Result<(), KernelError> {
        let ratio = self.tail_ratio();
        if ratio > TAIL_THRESHOLD {
            Err(KernelError::SpectralTailTooFat { ratio })
        } else {
            Ok(())
        }
    }
}

impl Add for &CircleFunction {
    type Output = CircleFunction;
    fn add(self, rhs: Self) -> CircleFunction {
        assert_eq!(self.half_order, rhs.half_order, "half orders differ");
        CircleFunction::from_dft_modes(
            self.half_order,
            self.modes.iter().zip(&rhs.modes).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &CircleFunction {
    type Output = CircleFunction;
    fn sub(self, rhs: Self) -> CircleFunction {
        assert_eq!(self.half_order, rhs.half_order, "half orders differ");
        CircleFunction::from_dft_modes(
            self.half_order,
            self.modes.iter().zip(&rhs.modes).map(|(a, b)| a - b).collect(),
        )
    }
}

impl Mul for &CircleFunction {
    type Output = CircleFunction;
    fn mul(self, rhs: Self) -> CircleFunction {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Neg for &CircleFunction {
    type Output = CircleFunction;
    fn neg(self) -> CircleFunction {
        self.scale(C::new(-1.0, 0.0))
    }
}

/// Linear Riemann splitting `φ = λ·ℍ₊φ + ℍ₋φ`.
///
/// `ℍ₊φ` carries the modes `φ_{k+1}`, `k ≥ 0`; `ℍ₋φ` carries `φ_k`, `k ≤ 0`.
/// The identity holds exactly in coefficients.
pub fn h_split(phi: &CircleFunction) -> (CircleFunction, CircleFunction) {
    let n = phi.half_order;
    let plus = CircleFunction::from_modes(
        n,
        phi.modes().filter(|&(k, _)| k >= 1).map(|(k, c)| (k - 1, c)),
    );
    let minus = phi.nonpositive_part();
    (plus, minus)
}

/// Continuous branch of `log φ` along the ordered samples, with the winding
/// index of `φ`.
///
/// The imaginary part starts at `arg φ(λ_0)` and accumulates the nearest-branch
/// phase increments; when the index is nonzero the returned function carries
/// the corresponding `2πn` jump between the last and the first sample.
pub fn continuous_log(
    phi: &CircleFunction,
    cfg: &IndexConfig,
) -> Result<(CircleFunction, i64), KernelError> {
    let samples = phi.samples();
    for (j, s) in samples.iter().enumerate() {
        let v = s.norm();
        if !(v > cfg.floor) {
            return Err(KernelError::NearZeroOnCircle { sample: j, value: v });
        }
    }
    let m = samples.len();
    let mut out = Vec::with_capacity(m);
    let mut theta = samples[0].arg();
    let mut total = 0.0;
    for j in 0..m {
        if j > 0 {
            let d = (samples[j] / samples[j - 1]).arg();
            if d.abs() >= cfg.max_jump {
                return Err(KernelError::PhaseJumpTooLarge { sample: j - 1, jump: d });
            }
            theta += d;
            total += d;
        }
        out.push(C::new(samples[j].norm().ln(), theta));
    }
    let closing = (samples[0] / samples[m - 1]).arg();
    if closing.abs() >= cfg.max_jump {
        return Err(KernelError::PhaseJumpTooLarge {
            sample: m - 1,
            jump: closing,
        });
    }
    total += closing;
    let index = (total / (2.0 * PI)).round() as i64;
    Ok((CircleFunction::from_samples(phi.half_order, out), index))
}

/// Winding number of `φ` around 0 with the default thresholds.
pub fn winding_index(phi: &CircleFunction) -> Result<i64, KernelError> {
    winding_index_with(phi, &IndexConfig::default())
}

pub fn winding_index_with(phi: &CircleFunction, cfg: &IndexConfig) -> Result<i64, KernelError> {
    continuous_log(phi, cfg).map(|(_, n)| n)
}

/// Multiplicative splitting `φ = 𝕄₊φ / 𝕄₋φ` of an index-0 function, with
/// `𝕄₊φ(0) = 1`.
pub fn mult_split(phi: &CircleFunction) -> Result<(CircleFunction, CircleFunction), KernelError> {
    let f = factor_index_zero(phi, 0, &IndexConfig::default())?;
    Ok((f.plus, f.minus))
}

/// `φ = λⁿ·a₊/a₋` with the inverses of both factors.
#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffFactors {
    pub index: i64,
    /// `a₊`, analytic and invertible inside, `a₊(0) = 1`.
    pub plus: CircleFunction,
    /// `a₋`, analytic and invertible outside.
    pub minus: CircleFunction,
    pub plus_inv: CircleFunction,
    pub minus_inv: CircleFunction,
}

/// Birkhoff factorization of a nonvanishing circle function.
pub fn birkhoff_factor(phi: &CircleFunction) -> Result<BirkhoffFactors, KernelError> {
    birkhoff_factor_with(phi, &IndexConfig::default())
}

pub fn birkhoff_factor_with(
    phi: &CircleFunction,
    cfg: &IndexConfig,
) -> Result<BirkhoffFactors, KernelError> {
    let n = winding_index_with(phi, cfg)?;
    factor_index_zero(&phi.shift(-n), n, cfg)
}

fn factor_index_zero(
    phi: &CircleFunction,
    index: i64,
    cfg: &IndexConfig,
) -> Result<BirkhoffFactors, KernelError> {
    let (log, n) = continuous_log(phi, cfg)?;
    if n != 0 {
        return Err(KernelError::NonzeroIndex(n));
    }
    let (hp, hm) = h_split(&log);
    let up = hp.shift(1);
    Ok(BirkhoffFactors {
        index,
        plus: up.exp(),
        plus_inv: (-&up).exp(),
        minus: (-&hm).exp(),
        minus_inv: hm.exp(),
    })
}

fn check_sampling(g: &dyn GluingFunction, sigma: &CircleFunction) -> Result<(), KernelError> {
    if let Some(expected) = g.sample_count() {
        if expected != sigma.len() {
            return Err(KernelError::SampleCountMismatch {
                expected,
                got: sigma.len(),
            });
        }
    }
    let n = sigma.half_order();
    for (j, s) in sigma.samples().iter().enumerate() {
        let modulus = s.norm();
        if !g.admits(node(n, j), *s) {
            let delta = g.delta();
            return Err(KernelError::TArgumentOutOfDisk {
                sample: j,
                modulus,
                delta,
            });
        }
    }
    Ok(())
}

/// `λ ↦ g(λ, σ(λ))` on the circle samples.
pub fn compose_gluing(
    g: &dyn GluingFunction,
    sigma: &CircleFunction,
) -> Result<CircleFunction, KernelError> {
    check_sampling(g, sigma)?;
    let n = sigma.half_order();
    Ok(CircleFunction::from_samples(
        n,
        sigma
            .samples()
            .iter()
            .enumerate()
            .map(|(j, &s)| g.eval(node(n, j), s))
            .collect(),
    ))
}

/// `λ ↦ ∂g/∂t(λ, σ(λ))` on the circle samples.
pub fn compose_gluing_dt(
    g: &dyn GluingFunction,
    sigma: &CircleFunction,
) -> Result<CircleFunction, KernelError> {
    check_sampling(g, sigma)?;
    let n = sigma.half_order();
    Ok(CircleFunction::from_samples(
        n,
        sigma
            .samples()
            .iter()
            .enumerate()
            .map(|(j, &s)| g.dt(node(n, j), s))
            .collect(),
    ))
}
