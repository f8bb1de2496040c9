//! Shooting the characteristic ODE, fitting the gluing table, and the
//! reconstruction of solutions from it.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::sampled::{clenshaw, SampledGluing};
use super::{GlueError, GlueOptions, TransversalCurve};
use crate::annulus::node;
use crate::ode::{integrate_segment, OdeOptions};
use crate::pde::{ABCTriple, Grid3, LambdaTriple, ScalarField3, SolutionOracle};
use crate::riemann::{assemble_wave_field, check_wave_gluing, solve_strip, wave_strips, Hole, Method, SolverOptions};
use crate::C;

/// Relative size below which `w_z` counts as vanishing.
const WZ_FLOOR: f64 = 1e-12;

/// Integrates the characteristic ODE for the cross-ratio `mu` from
/// `(x_from, z_from)` to `x_to`, with `y = Y(x)` carried along, and returns
/// `z(x_to)`.
#[allow(clippy::too_many_arguments)]
pub fn characteristic_shot(
    oracle: &dyn SolutionOracle,
    abc: &ABCTriple,
    mu: C,
    curve: &TransversalCurve,
    x_from: C,
    z_from: C,
    x_to: C,
    ode: &OdeOptions,
) -> Result<C, GlueError> {
    let y_from = curve.value(x_from)?;
    let end = integrate_segment(
        |x, s: &[C; 2]| -> Result<[C; 2], GlueError> {
            let [y, z] = *s;
            let slope = curve.slope(x, y)?;
            let g = oracle.gradient([x, y, z]);
            let scale = g[0].norm() + g[1].norm() + g[2].norm();
            if !(g[2].norm() > WZ_FLOOR * scale) {
                return Err(GlueError::NondegeneracyLost { x });
            }
            let cwz = abc.c * g[2];
            let dz = abc.a * g[0] / (mu * cwz) - abc.b * g[1] * slope / ((mu - 1.0) * cwz);
            Ok([slope, dz])
        },
        x_from,
        x_to,
        [y_from, z_from],
        ode,
    )?;
    Ok(end[1])
}

fn cheb_nodes(d: usize) -> Vec<f64> {
    (0..d).map(|k| (PI * (k as f64 + 0.5) / d as f64).cos()).collect()
}

/// Chebyshev coefficients of the interpolant through values at
/// [`cheb_nodes`].
fn cheb_fit(values: &[C]) -> Vec<C> {
    let d = values.len();
    (0..d)
        .map(|m| {
            let s: C = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * (PI * m as f64 * (k as f64 + 0.5) / d as f64).cos())
                .sum();
            let w = if m == 0 { 1.0 } else { 2.0 };
            s * (w / d as f64)
        })
        .collect()
}

/// Held-out points in `u = t/t_max`: the interleaved Chebyshev extrema and
/// four points off the real axis.
fn held_out(d: usize) -> Vec<C> {
    let mut u: Vec<C> = (1..d).map(|k| C::new((PI * k as f64 / d as f64).cos(), 0.0)).collect();
    u.retain(|z| z.norm() > 1e-12);
    u.extend((0..4).map(|k| C::from_polar(0.5, PI * (2 * k + 1) as f64 / 4.0)));
    u
}

/// Builds the gluing table of `oracle` by shooting the characteristic ODE
/// at every circle sample and Chebyshev node.
pub fn glue_sample(
    oracle: &dyn SolutionOracle,
    lambdas: LambdaTriple,
    curve: &TransversalCurve,
    opts: &GlueOptions,
) -> Result<SampledGluing, GlueError> {
    let m = 2 * opts.half_order;
    let rows = (0..m)
        .map(|j| glue_row(oracle, lambdas, curve, opts, j))
        .collect::<Result<Vec<_>, _>>()?;
    finish_table(lambdas, curve, opts, rows)
}

/// The Chebyshev row and the worst held-out miss at one circle sample.
pub fn glue_row(
    oracle: &dyn SolutionOracle,
    lambdas: LambdaTriple,
    curve: &TransversalCurve,
    opts: &GlueOptions,
    j: usize,
) -> Result<(Vec<C>, f64), GlueError> {
    if opts.degree == 0 || !opts.degree.is_multiple_of(2) {
        return Err(GlueError::InvalidData(alloc::format!("degree must be even and positive, got {}", opts.degree)));
    }
    if !(lambdas.l1.norm() < 1.0 && lambdas.l2.norm() < 1.0 && lambdas.l3.norm() > 1.0) {
        return Err(GlueError::LambdaPlacement);
    }
    if curve.radius() < opts.t_max {
        return Err(GlueError::InvalidData(alloc::format!(
            "curve radius {} is smaller than t_max {}",
            curve.radius(),
            opts.t_max
        )));
    }
    let abc = lambdas.abc()?;
    let lambda = node(opts.half_order, j);
    let mu = lambdas.mu(lambda)?;
    if mu.norm() <= opts.epsilon1 || (mu - 1.0).norm() <= opts.epsilon1 {
        return Err(GlueError::MuTooCloseToPole { sample: j, mu });
    }
    let zero = C::new(0.0, 0.0);
    let shot = |t: C| characteristic_shot(oracle, &abc, mu, curve, t, zero, zero, &opts.ode);
    let values = cheb_nodes(opts.degree)
        .into_iter()
        .map(|u| {
            let t = C::new(u * opts.t_max, 0.0);
            shot(t).map(|g| g / t)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let coeffs = cheb_fit(&values);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for u in held_out(opts.degree) {
        let t = u * opts.t_max;
        let exact = shot(t)?;
        let fit = t * clenshaw(&coeffs, u);
        worst = worst.max((fit - exact).norm());
        scale = scale.max(exact.norm());
    }
    let miss = if scale > 0.0 { worst / scale } else { worst };
    Ok((coeffs, miss))
}

/// Assembles rows from [`glue_row`] into a table, rejecting fits whose worst
/// held-out miss exceeds the budget.
pub fn finish_table(
    lambdas: LambdaTriple,
    curve: &TransversalCurve,
    opts: &GlueOptions,
    rows: Vec<(Vec<C>, f64)>,
) -> Result<SampledGluing, GlueError> {
    let fit_residual = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    if !(fit_residual <= opts.max_fit_residual) {
        return Err(GlueError::FitInaccurate { residual: fit_residual });
    }
    let m = rows.len();
    let samples = (0..m).map(|j| node(m / 2, j)).collect();
    SampledGluing::new(
        lambdas,
        samples,
        rows.into_iter().map(|r| r.0).collect(),
        opts.t_max,
        fit_residual,
        curve.describe(),
    )
}

/// Outcome of the transversality condition on the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    /// `Q = Y′(0)·B·wy(0)/(A·wx(0))`.
    pub q: C,
    /// `|(Q·λ1 − λ2)/(Q − 1)|`, infinite when `Q = 1`.
    pub lhs: f64,
    pub ok: bool,
    /// `lhs − 1`.
    pub margin: f64,
}

/// Checks `|(Q·λ1 − λ2)/(Q − 1)| > 1` for the curve through the origin.
/// The canonical curve has `Q = 1`, reported as a pass with infinite margin.
pub fn check_transversality(
    oracle: &dyn SolutionOracle,
    lambdas: LambdaTriple,
    curve: &TransversalCurve,
) -> Result<ConditionReport, GlueError> {
    let abc = lambdas.abc()?;
    let zero = C::new(0.0, 0.0);
    let g = oracle.gradient([zero; 3]);
    let q = curve.slope_at_origin()? * abc.b * g[1] / (abc.a * g[0]);
    let lhs = if (q - 1.0).norm() < 1e-12 {
        f64::INFINITY
    } else {
        ((q * lambdas.l1 - lambdas.l2) / (q - 1.0)).norm()
    };
    Ok(ConditionReport {
        q,
        lhs,
        ok: lhs > 1.0,
        margin: lhs - 1.0,
    })
}

/// Boundary points `(x, φ2(y), z)` for every grid point, in grid order.
pub fn preimage_points(curve: &TransversalCurve, grid: &Grid3) -> Result<Vec<[C; 3]>, GlueError> {
    let ny = grid.shape[1];
    let phi2 = (0..ny)
        .map(|iy| curve.inverse(C::new(grid.coord(1, iy), 0.0)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((0..grid.len())
        .map(|i| {
            let [ix, iy, iz] = grid.unravel(i);
            [C::new(grid.coord(0, ix), 0.0), phi2[iy], C::new(grid.coord(2, iz), 0.0)]
        })
        .collect())
}

/// A reconstructed solution with the points the solver could not reach.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedField {
    pub field: ScalarField3,
    pub holes: Vec<Hole>,
}

/// `ŵ(x, y, z) = ψ(w̃(x, φ2(y), z))`, where `w̃` solves the Riemann problem of
/// the table and `ψ(t) = ŵ(t, Y(t), 0)`.
pub fn reconstruct(
    sg: &SampledGluing,
    curve: &TransversalCurve,
    psi: &dyn Fn(C) -> Result<C, GlueError>,
    grid: &Grid3,
    opts: &SolverOptions,
) -> Result<ReconstructedField, GlueError> {
    let opts = SolverOptions {
        half_order: sg.lambda_samples().len() / 2,
        ..*opts
    };
    check_wave_gluing(sg, &opts)?;
    let points = preimage_points(curve, grid)?;
    let strips = wave_strips(grid);
    let lambdas = sg.lambdas().as_array();
    let results = strips
        .iter()
        .map(|s| {
            let pts: Vec<[C; 3]> = s.iter().map(|&i| points[i]).collect();
            solve_strip(sg, lambdas, &pts, &opts, Method::Newton)
        })
        .collect();
    let wf = assemble_wave_field(*grid, &strips, results);
    apply_psi(wf.field, wf.holes, psi)
}

/// Replaces every valid value `v` by `ψ(v)`.
pub fn apply_psi(
    mut field: ScalarField3,
    holes: Vec<Hole>,
    psi: &dyn Fn(C) -> Result<C, GlueError>,
) -> Result<ReconstructedField, GlueError> {
    for i in 0..field.grid().len() {
        if field.is_valid(i) {
            let v = field.values()[i];
            field.values_mut()[i] = psi(v)?;
        }
    }
    Ok(ReconstructedField { field, holes })
}
