//! Transversal curves `y = Y(x)` with `Y(0) = 0`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::GlueError;
use crate::ode::{integrate_segment, integrate_segment_dense, DenseSolution, OdeOptions};
use crate::pde::{ABCTriple, SolutionOracle};
use crate::C;

/// Relative size below which `B·wy` counts as vanishing.
const SLOPE_FLOOR: f64 = 1e-12;
const INVERSE_TOL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub enum CurveKind {
    /// `dY/dx = A·wx(x, Y, 0)/(B·wy(x, Y, 0))`, traced with dense output
    /// over the real interval `[−radius, radius]`.
    Canonical {
        oracle: Arc<dyn SolutionOracle>,
        abc: ABCTriple,
        forward: DenseSolution<1>,
        backward: DenseSolution<1>,
        ode: OdeOptions,
    },
    /// `Y(x) = Σ_{k≥1} c_k x^k`, lowest degree first.
    Polynomial(Vec<C>),
}

#[derive(Debug, Clone)]
pub struct TransversalCurve {
    kind: CurveKind,
    radius: f64,
}

fn canonical_slope(oracle: &dyn SolutionOracle, abc: &ABCTriple, x: C, y: C) -> Result<C, GlueError> {
    let g = oracle.gradient([x, y, C::new(0.0, 0.0)]);
    let num = abc.a * g[0];
    let den = abc.b * g[1];
    let ok = den.re.is_finite() && den.im.is_finite() && num.re.is_finite() && num.im.is_finite();
    if !ok || den.norm() <= SLOPE_FLOOR * num.norm() || den.norm() == 0.0 {
        return Err(GlueError::DerivativeBlowup { x });
    }
    Ok(num / den)
}

impl TransversalCurve {
    /// Traces the canonical curve of `oracle` over `[−radius, radius]`.
    pub fn canonical(
        oracle: Arc<dyn SolutionOracle>,
        abc: ABCTriple,
        radius: f64,
        ode: OdeOptions,
    ) -> Result<Self, GlueError> {
        let zero = C::new(0.0, 0.0);
        let trace = |end: f64| {
            integrate_segment_dense(
                |x, y: &[C; 1]| canonical_slope(&*oracle, &abc, x, y[0]).map(|s| [s]),
                zero,
                C::new(end, 0.0),
                [zero],
                &ode,
            )
        };
        let forward = trace(radius)?;
        let backward = trace(-radius)?;
        Ok(Self {
            kind: CurveKind::Canonical {
                oracle,
                abc,
                forward,
                backward,
                ode,
            },
            radius,
        })
    }

    /// `Y(x) = Σ_{k≥1} c_k x^k`. Needs `c_1 ≠ 0`.
    pub fn polynomial(coeffs: Vec<C>, radius: f64) -> Result<Self, GlueError> {
        if coeffs.first().is_none_or(|c| c.norm() == 0.0) {
            return Err(GlueError::InvalidData("polynomial curve needs a nonzero linear coefficient".into()));
        }
        Ok(Self {
            kind: CurveKind::Polynomial(coeffs),
            radius,
        })
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// A short text form for provenance records.
    pub fn describe(&self) -> String {
        match &self.kind {
            CurveKind::Canonical { .. } => format!("canonical, radius {}", self.radius),
            CurveKind::Polynomial(c) => {
                let terms: Vec<String> = c.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
                format!("polynomial [{}], radius {}", terms.join(", "), self.radius)
            }
        }
    }

    fn check_domain(&self, x: C) -> Result<(), GlueError> {
        if x.norm() > self.radius * (1.0 + 1e-12) {
            return Err(GlueError::LeftDomain { x });
        }
        Ok(())
    }

    /// `Y(x)`. Real points use the dense trace; complex points integrate
    /// along the segment from 0.
    pub fn value(&self, x: C) -> Result<C, GlueError> {
        self.check_domain(x)?;
        match &self.kind {
            CurveKind::Polynomial(c) => {
                let mut v = C::new(0.0, 0.0);
                for &ck in c.iter().rev() {
                    v = (v + ck) * x;
                }
                Ok(v)
            }
            CurveKind::Canonical {
                oracle,
                abc,
                forward,
                backward,
                ode,
            } => {
                if x.im == 0.0 {
                    let sol = if x.re >= 0.0 { forward } else { backward };
                    return Ok(sol.eval_at(x)[0]);
                }
                let y = integrate_segment(
                    |s, y: &[C; 1]| canonical_slope(&**oracle, abc, s, y[0]).map(|v| [v]),
                    C::new(0.0, 0.0),
                    x,
                    [C::new(0.0, 0.0)],
                    ode,
                )?;
                Ok(y[0])
            }
        }
    }

    /// `dY/dx` at `(x, y)` on the curve. The canonical slope depends on the
    /// point, the polynomial one on `x` only.
    pub fn slope(&self, x: C, y: C) -> Result<C, GlueError> {
        match &self.kind {
            CurveKind::Polynomial(c) => {
                let mut d = C::new(0.0, 0.0);
                for (k, &ck) in c.iter().enumerate().rev() {
                    d = d * x + ck * (k as f64 + 1.0);
                }
                Ok(d)
            }
            CurveKind::Canonical { oracle, abc, .. } => canonical_slope(&**oracle, abc, x, y),
        }
    }

    /// `Y′(0)`.
    pub fn slope_at_origin(&self) -> Result<C, GlueError> {
        self.slope(C::new(0.0, 0.0), C::new(0.0, 0.0))
    }

    /// `φ2(y) = Y⁻¹(y)` by Newton iteration on the curve.
    pub fn inverse(&self, y: C) -> Result<C, GlueError> {
        if y.norm() == 0.0 {
            return Ok(y);
        }
        let mut x = y / self.slope_at_origin()?;
        for _ in 0..50 {
            if x.norm() > self.radius * (1.0 + 1e-12) {
                return Err(GlueError::InverseOutOfRange { y });
            }
            let yx = self.value(x)?;
            let step = (yx - y) / self.slope(x, yx)?;
            x -= step;
            if step.norm() <= INVERSE_TOL * (1.0 + x.norm()) {
                self.check_domain(x).map_err(|_| GlueError::InverseOutOfRange { y })?;
                return Ok(x);
            }
        }
        Err(GlueError::InverseOutOfRange { y })
    }
}
