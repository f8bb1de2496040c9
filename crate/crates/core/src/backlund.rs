//! The Bäcklund transform between (A,B,C)-equations.
//!
//! For a solution `w` of the source equation and a target triple
//! `(Ã, B̃, C̃)`, the transform `v` has `∇v ∥ (α·wx, β·wy, γ·wz)` with
//! `α = A/Ã`, `β = B/B̃`, `γ = C/C̃`. The level sets of `v` are traced back to
//! the `x`-axis, which fixes the gauge `v(x, 0, 0) = x`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::ode::{integrate_segment, OdeError, OdeOptions};
use crate::pde::{principal_symbol, ABCTriple, Grid3, PdeError, ScalarField3, SolutionOracle};
use crate::C;

/// Relative tolerance for classifying coefficients as equal.
pub const EQUALITY_TOLERANCE: f64 = 1e-12;
/// Relative size below which `wx` counts as vanishing.
const WX_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BacklundError {
    #[error("α = β = γ: source and target equations coincide up to a factor")]
    ProportionalTriples,
    #[error("A·B̃ = Ã·B or another coefficient pair coincides without all three agreeing")]
    HypothesisViolated,
    #[error("w_x nearly vanishes at {point:?}")]
    NondegeneracyLost { point: [C; 3] },
    #[error("trace left the working box at {point:?}")]
    LeftDomain { point: [C; 3] },
    #[error("leaf trace failed: {0}")]
    Ode(OdeError),
}

impl From<OdeError> for BacklundError {
    fn from(e: OdeError) -> Self {
        BacklundError::Ode(e)
    }
}

/// `(α, β, γ)` with the triples they came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacklundCoefficients {
    pub alpha: C,
    pub beta: C,
    pub gamma: C,
    pub source: ABCTriple,
    pub target: ABCTriple,
}

fn nearly_equal(a: C, b: C) -> bool {
    (a - b).norm() <= EQUALITY_TOLERANCE * a.norm().max(b.norm())
}

/// Computes `(α, β, γ)`. Any two equal forces all three equal, so only
/// pairwise distinct coefficients are accepted.
pub fn coefficients(source: ABCTriple, target: ABCTriple) -> Result<BacklundCoefficients, BacklundError> {
    let alpha = source.a / target.a;
    let beta = source.b / target.b;
    let gamma = source.c / target.c;
    let (ab, bg, ag) = (nearly_equal(alpha, beta), nearly_equal(beta, gamma), nearly_equal(alpha, gamma));
    if ab && bg && ag {
        return Err(BacklundError::ProportionalTriples);
    }
    if ab || bg || ag {
        return Err(BacklundError::HypothesisViolated);
    }
    Ok(BacklundCoefficients {
        alpha,
        beta,
        gamma,
        source,
        target,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub ode: OdeOptions,
    /// Traces fail once a coordinate exceeds this modulus.
    pub box_radius: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            box_radius: f64::INFINITY,
        }
    }
}

/// Order of the two tracing stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOrder {
    /// Along `z` at fixed `y`, then along `y` in the plane `z = 0`.
    ZThenY,
    /// Along `y` at fixed `z`, then along `z` in the plane `y = 0`.
    YThenZ,
}

/// Integrates `dx/ds = −coef·w_s/(α·wx)` along coordinate `axis` (1 = y,
/// 2 = z) from `p[axis]` to 0, returning the landing point.
fn trace_axis(
    oracle: &dyn SolutionOracle,
    coeff: &BacklundCoefficients,
    p: [C; 3],
    axis: usize,
    opts: &TraceOptions,
) -> Result<[C; 3], BacklundError> {
    let factor = if axis == 1 { coeff.beta } else { coeff.gamma } / coeff.alpha;
    let at = |x: C, s: C| {
        let mut q = p;
        q[0] = x;
        q[axis] = s;
        q
    };
    let end = integrate_segment(
        |s, x: &[C; 1]| -> Result<[C; 1], BacklundError> {
            let q = at(x[0], s);
            if q.iter().any(|c| c.norm() > opts.box_radius) {
                return Err(BacklundError::LeftDomain { point: q });
            }
            let g = oracle.gradient(q);
            let scale = g[0].norm() + g[1].norm() + g[2].norm();
            if !(g[0].norm() > WX_FLOOR * scale) {
                return Err(BacklundError::NondegeneracyLost { point: q });
            }
            Ok([-factor * g[axis] / g[0]])
        },
        p[axis],
        C::new(0.0, 0.0),
        [p[0]],
        &opts.ode,
    )?;
    Ok(at(end[0], C::new(0.0, 0.0)))
}

/// `v(p)` in the gauge `v(x, 0, 0) = x`, tracing in the given order.
pub fn leaf_trace_ordered(
    oracle: &dyn SolutionOracle,
    coeff: &BacklundCoefficients,
    p: [C; 3],
    order: TraceOrder,
    opts: &TraceOptions,
) -> Result<C, BacklundError> {
    let (first, second) = match order {
        TraceOrder::ZThenY => (2, 1),
        TraceOrder::YThenZ => (1, 2),
    };
    let q = trace_axis(oracle, coeff, p, first, opts)?;
    let r = trace_axis(oracle, coeff, q, second, opts)?;
    Ok(r[0])
}

/// `v(p)` by the canonical order: `z` first, then `y`.
pub fn leaf_trace(
    oracle: &dyn SolutionOracle,
    coeff: &BacklundCoefficients,
    p: [C; 3],
    opts: &TraceOptions,
) -> Result<C, BacklundError> {
    leaf_trace_ordered(oracle, coeff, p, TraceOrder::ZThenY, opts)
}

/// A transform sampled on a grid. Failed points hold NaN and are listed.
#[derive(Debug, Clone, PartialEq)]
pub struct BacklundField {
    pub field: ScalarField3,
    pub holes: Vec<(usize, BacklundError)>,
}

/// Assembles per-point trace results, in grid order, into a field.
pub fn assemble_backlund_field(grid: Grid3, results: Vec<Result<C, BacklundError>>) -> BacklundField {
    let mut field = ScalarField3::filled_nan(grid);
    let mut holes = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => field.values_mut()[i] = v,
            Err(e) => holes.push((i, e)),
        }
    }
    BacklundField { field, holes }
}

/// `v` on every grid point.
pub fn transform(
    oracle: &dyn SolutionOracle,
    coeff: &BacklundCoefficients,
    grid: &Grid3,
    opts: &TraceOptions,
) -> BacklundField {
    let results = (0..grid.len())
        .map(|i| leaf_trace(oracle, coeff, grid.cpoint(i), opts))
        .collect();
    assemble_backlund_field(*grid, results)
}

/// Scaled residuals of the first-order system linking `w` and `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemReport {
    /// `A·B̃·wx·vy − Ã·B·wy·vx`, max-norm over the two terms' scale.
    pub residual_xy: f64,
    /// `A·C̃·wx·vz − Ã·C·wz·vx`, scaled likewise.
    pub residual_xz: f64,
    /// Largest 2×2 minor of `[(vx, vy, vz); (α·wx, β·wy, γ·wz)]` over the
    /// product of the row norms.
    pub max_minor: f64,
    /// The source principal symbol at covector `∇v`, over its largest term.
    pub eikonal: f64,
    pub points: usize,
}

impl SystemReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual_xy <= tol && self.residual_xz <= tol && self.max_minor <= tol
    }
}

fn norm3(v: [C; 3]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

/// Checks the system on the interior points where both fields have
/// central differences.
pub fn verify_system(
    w: &ScalarField3,
    v: &ScalarField3,
    coeff: &BacklundCoefficients,
) -> Result<SystemReport, PdeError> {
    if w.grid() != v.grid() {
        return Err(PdeError::GridMismatch);
    }
    w.require_interior()?;
    let (s, t) = (coeff.source, coeff.target);
    let mut res = [0.0f64; 3];
    let mut scale = [0.0f64; 3];
    let mut max_minor = 0.0f64;
    let mut points = 0;
    for i in 0..w.grid().len() {
        let (Some(gw), Some(gv)) = (w.gradient_at(i), v.gradient_at(i)) else {
            continue;
        };
        points += 1;
        let pairs = [
            (s.a * t.b * gw[0] * gv[1], t.a * s.b * gw[1] * gv[0]),
            (s.a * t.c * gw[0] * gv[2], t.a * s.c * gw[2] * gv[0]),
        ];
        for (k, (l, r)) in pairs.into_iter().enumerate() {
            res[k] = res[k].max((l - r).norm());
            scale[k] = scale[k].max(l.norm()).max(r.norm());
        }
        let aw = [coeff.alpha * gw[0], coeff.beta * gw[1], coeff.gamma * gw[2]];
        let rows = norm3(gv) * norm3(aw);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let minor = gv[a] * aw[b] - gv[b] * aw[a];
            if rows > 0.0 {
                max_minor = max_minor.max(minor.norm() / rows);
            }
        }
        let sym = principal_symbol(gw, gv, &s);
        let terms = [s.a * gw[0] * gv[1] * gv[2], s.b * gw[1] * gv[0] * gv[2], s.c * gw[2] * gv[0] * gv[1]];
        res[2] = res[2].max(sym.norm());
        scale[2] = terms.iter().fold(scale[2], |m, z| m.max(z.norm()));
    }
    let ratio = |k: usize| if scale[k] > 0.0 { res[k] / scale[k] } else { res[k] };
    Ok(SystemReport {
        residual_xy: ratio(0),
        residual_xz: ratio(1),
        max_minor,
        eikonal: ratio(2),
        points,
    })
}
