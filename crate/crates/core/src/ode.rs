//! Adaptive Dormand–Prince 5(4) integration of holomorphic ODEs along straight
//! segments of the complex plane.
//!
//! An ODE `dy/dx = f(x, y)` is integrated from `x0` to `x1` by writing
//! `x = x0 + s·(x1 − x0)` with real `s ∈ [0, 1]`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::C;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Initial step as a fraction of the segment.
    pub initial_step: f64,
    /// Smallest admissible step as a fraction of the segment.
    pub min_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            max_steps: 100_000,
            initial_step: 0.05,
            min_step: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at s = {s}")]
    StepSizeUnderflow { s: f64 },
    #[error("step budget exhausted at s = {s}")]
    TooManySteps { s: f64 },
    #[error("non-finite state at s = {s}")]
    NonFinite { s: f64 },
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Hermite-type continuous extension of one accepted step.
#[derive(Debug, Clone, Copy)]
struct DenseStep<const D: usize> {
    s0: f64,
    h: f64,
    r: [[C; D]; 5],
}

impl<const D: usize> DenseStep<D> {
    fn eval(&self, s: f64) -> [C; D] {
        let th = (s - self.s0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.r;
        core::array::from_fn(|i| {
            r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])))
        })
    }
}

/// Continuous solution along a segment, accurate to the integration
/// tolerance at every intermediate point.
#[derive(Debug, Clone)]
pub struct DenseSolution<const D: usize> {
    pub x0: C,
    pub x1: C,
    steps: Vec<DenseStep<D>>,
    end: [C; D],
}

impl<const D: usize> DenseSolution<D> {
    pub fn end(&self) -> [C; D] {
        self.end
    }

    pub fn steps(&self) -> usize {
        self.steps.len()
    }

    /// State at the segment parameter `s ∈ [0, 1]`.
    pub fn eval_param(&self, s: f64) -> [C; D] {
        if self.steps.is_empty() {
            return self.end;
        }
        let k = self.steps.partition_point(|st| st.s0 <= s).saturating_sub(1);
        self.steps[k].eval(s.clamp(0.0, 1.0))
    }

    /// State at the point of the segment closest to `x`.
    pub fn eval_at(&self, x: C) -> [C; D] {
        let d = self.x1 - self.x0;
        if d.norm_sqr() == 0.0 {
            return self.end;
        }
        let s = ((x - self.x0) * d.conj()).re / d.norm_sqr();
        self.eval_param(s)
    }
}

fn finite<const D: usize>(y: &[C; D]) -> bool {
    y.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn combo<const D: usize>(y: &[C; D], h: f64, terms: &[(f64, &[C; D])]) -> [C; D] {
    core::array::from_fn(|i| {
        let mut acc = C::new(0.0, 0.0);
        for (w, k) in terms {
            acc += k[i] * *w;
        }
        y[i] + acc * h
    })
}

/// Integrates `dy/dx = f(x, y)` from `x0` to `x1` and returns the end state.
pub fn integrate_segment<const D: usize, E, F>(
    f: F,
    x0: C,
    x1: C,
    y0: [C; D],
    opts: &OdeOptions,
) -> Result<[C; D], E>
where
    F: FnMut(C, &[C; D]) -> Result<[C; D], E>,
    E: From<OdeError>,
{
    run(f, x0, x1, y0, opts, false).map(|sol| sol.end)
}

/// Like [`integrate_segment`] but keeps the continuous extension.
pub fn integrate_segment_dense<const D: usize, E, F>(
    f: F,
    x0: C,
    x1: C,
    y0: [C; D],
    opts: &OdeOptions,
) -> Result<DenseSolution<D>, E>
where
    F: FnMut(C, &[C; D]) -> Result<[C; D], E>,
    E: From<OdeError>,
{
    run(f, x0, x1, y0, opts, true)
}

fn run<const D: usize, E, F>(
    mut f: F,
    x0: C,
    x1: C,
    y0: [C; D],
    opts: &OdeOptions,
    dense: bool,
) -> Result<DenseSolution<D>, E>
where
    F: FnMut(C, &[C; D]) -> Result<[C; D], E>,
    E: From<OdeError>,
{
    let mut sol = DenseSolution {
        x0,
        x1,
        steps: Vec::new(),
        end: y0,
    };
    let dx = x1 - x0;
    if dx.norm() == 0.0 {
        return Ok(sol);
    }
    let mut rhs = |s: f64, y: &[C; D]| -> Result<[C; D], E> {
        let v = f(x0 + dx * s, y)?;
        if !finite(&v) {
            return Err(OdeError::NonFinite { s }.into());
        }
        Ok(v.map(|z| z * dx))
    };

    let mut s = 0.0f64;
    let mut y = y0;
    let mut k1 = rhs(s, &y)?;
    let mut h = opts.initial_step.min(1.0);
    let mut steps = 0usize;
    while s < 1.0 {
        if steps >= opts.max_steps {
            return Err(OdeError::TooManySteps { s }.into());
        }
        steps += 1;
        let last = s + h >= 1.0;
        if last {
            h = 1.0 - s;
        }
        let k2 = rhs(s + C2 * h, &combo(&y, h, &[(A21, &k1)]))?;
        let k3 = rhs(s + C3 * h, &combo(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = rhs(s + C4 * h, &combo(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = rhs(
            s + C5 * h,
            &combo(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = rhs(
            s + h,
            &combo(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let ynew = combo(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(s + h, &ynew)?;

        let mut err = 0.0;
        for i in 0..D {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sk = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
            err += (e.norm() / sk).powi(2);
        }
        let err = (err / D.max(1) as f64).sqrt();
        if !err.is_finite() {
            return Err(OdeError::NonFinite { s }.into());
        }

        if err <= 1.0 {
            if dense {
                let mut r = [[C::new(0.0, 0.0); D]; 5];
                for i in 0..D {
                    let ydiff = ynew[i] - y[i];
                    let bspl = k1[i] * h - ydiff;
                    r[0][i] = y[i];
                    r[1][i] = ydiff;
                    r[2][i] = bspl;
                    r[3][i] = ydiff - k7[i] * h - bspl;
                    r[4][i] = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
                }
                sol.steps.push(DenseStep { s0: s, h, r });
            }
            s = if last { 1.0 } else { s + h };
            y = ynew;
            k1 = k7;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if h < opts.min_step && s < 1.0 {
            return Err(OdeError::StepSizeUnderflow { s }.into());
        }
    }
    sol.end = y;
    Ok(sol)
}
