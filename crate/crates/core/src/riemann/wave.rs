//! Assembly of `w(x, y, z) = σ₊(0)` over grids of boundary values.
//!
//! Grids are solved in strips, one per `x`-plane. Inside a strip the points
//! are visited in serpentine order so that consecutive points are neighbours,
//! and each Newton solve is warm-started from the previous one. The strip
//! layout depends only on the grid, so any parallel driver that solves
//! strips independently reproduces the serial result bit for bit.

use alloc::vec::Vec;

use super::{
    solve_riemann_homotopy, solve_riemann_newton, GluingFunction, Method, RiemannSolution, ScaffoldPath,
    SolveError, SolverOptions,
};
use crate::annulus::{winding_index_with, CircleFunction, KernelError};
use crate::pde::{Grid3, ScalarField3};
use crate::scaffold::wave_scaffold;
use crate::C;

/// Why a grid point has no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoleCode {
    IndexNotOne,
    MaxItersExceeded,
    LeftTDisk,
    SpectralTailTooFat,
    PathLeftValidityRegion,
    ScaffoldBudget,
    NonFinite,
    Other,
}

impl HoleCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            HoleCode::IndexNotOne => "index_not_one",
            HoleCode::MaxItersExceeded => "max_iters_exceeded",
            HoleCode::LeftTDisk => "left_t_disk",
            HoleCode::SpectralTailTooFat => "spectral_tail_too_fat",
            HoleCode::PathLeftValidityRegion => "path_left_validity_region",
            HoleCode::ScaffoldBudget => "scaffold_budget",
            HoleCode::NonFinite => "non_finite",
            HoleCode::Other => "other",
        }
    }
}

impl From<&SolveError> for HoleCode {
    fn from(e: &SolveError) -> Self {
        match e {
            SolveError::IndexNotOne(_) | SolveError::PathIndexChanged { .. } => HoleCode::IndexNotOne,
            SolveError::MaxItersExceeded { .. } => HoleCode::MaxItersExceeded,
            SolveError::LeftTDisk { .. } => HoleCode::LeftTDisk,
            SolveError::SpectralTailTooFat { .. } => HoleCode::SpectralTailTooFat,
            SolveError::PathLeftValidityRegion { .. } => HoleCode::PathLeftValidityRegion,
            SolveError::Scaffold(_) => HoleCode::ScaffoldBudget,
            SolveError::NonFinite => HoleCode::NonFinite,
            _ => HoleCode::Other,
        }
    }
}

/// A grid point without a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hole {
    pub index: usize,
    pub code: HoleCode,
}

/// A solution sampled on a grid. Holes hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub field: ScalarField3,
    pub holes: Vec<Hole>,
    /// Largest Newton iteration count over the solved points.
    pub max_newton_iters: usize,
}

/// Checks `g(λ, 0) ≡ 0` and `ind ∂g/∂t(λ, 0) = −2`, the conditions under
/// which the wave scaffold has index 1.
pub fn check_wave_gluing(g: &dyn GluingFunction, opts: &SolverOptions) -> Result<(), SolveError> {
    if !g.zero_preserving() {
        return Err(SolveError::NotZeroPreserving);
    }
    let n = match g.sample_count() {
        Some(m) => m / 2,
        None => opts.half_order,
    };
    let zero = CircleFunction::zero(n);
    let phi = crate::annulus::compose_gluing_dt(g, &zero)?;
    let got = winding_index_with(&phi, &opts.index).map_err(|e: KernelError| SolveError::from(e))?;
    if got != -2 {
        return Err(SolveError::IndexPrecondition { expected: -2, got });
    }
    Ok(())
}

/// Solves the scaffolded problem for one boundary point.
pub fn wave_point(
    g: &dyn GluingFunction,
    lambdas: [C; 3],
    point: [C; 3],
    opts: &SolverOptions,
    method: Method,
    warm: Option<&RiemannSolution>,
) -> Result<RiemannSolution, SolveError> {
    let s = wave_scaffold(g, lambdas, point)?;
    match method {
        Method::Newton => solve_riemann_newton(&s, opts, warm),
        Method::Homotopy => solve_riemann_homotopy(&ScaffoldPath::new(&s), opts),
    }
}

/// Solves a chain of points in order, warm-starting each Newton solve from
/// the last success.
pub fn solve_strip(
    g: &dyn GluingFunction,
    lambdas: [C; 3],
    points: &[[C; 3]],
    opts: &SolverOptions,
    method: Method,
) -> Vec<Result<(C, usize), SolveError>> {
    let mut warm: Option<RiemannSolution> = None;
    points
        .iter()
        .map(|&p| {
            let r = wave_point(g, lambdas, p, opts, method, warm.as_ref());
            match r {
                Ok(sol) => {
                    let out = (sol.transform_value(), sol.newton_iters);
                    warm = Some(sol);
                    Ok(out)
                }
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Grid indices split into `x`-plane strips in serpentine order.
pub fn wave_strips(grid: &Grid3) -> Vec<Vec<usize>> {
    let [nx, ny, nz] = grid.shape;
    (0..nx)
        .map(|ix| {
            let mut strip = Vec::with_capacity(ny * nz);
            for iy in 0..ny {
                for k in 0..nz {
                    let iz = if iy % 2 == 0 { k } else { nz - 1 - k };
                    strip.push(grid.index(ix, iy, iz));
                }
            }
            strip
        })
        .collect()
}

/// Fills a [`WaveField`] from per-strip results.
pub fn assemble_wave_field(grid: Grid3, strips: &[Vec<usize>], results: Vec<Vec<Result<(C, usize), SolveError>>>) -> WaveField {
    let mut field = ScalarField3::filled_nan(grid);
    let mut holes = Vec::new();
    let mut max_iters = 0;
    for (strip, res) in strips.iter().zip(results) {
        for (&i, r) in strip.iter().zip(res) {
            match r {
                Ok((w, it)) => {
                    field.values_mut()[i] = w;
                    max_iters = max_iters.max(it);
                }
                Err(e) => holes.push(Hole {
                    index: i,
                    code: HoleCode::from(&e),
                }),
            }
        }
    }
    holes.sort_by_key(|h| h.index);
    WaveField {
        field,
        holes,
        max_newton_iters: max_iters,
    }
}

/// `w` on every grid point, solved strip by strip. Points that fail become
/// holes.
pub fn wave_solution(
    g: &dyn GluingFunction,
    lambdas: [C; 3],
    grid: &Grid3,
    opts: &SolverOptions,
    method: Method,
) -> Result<WaveField, SolveError> {
    check_wave_gluing(g, opts)?;
    let strips = wave_strips(grid);
    let results = strips
        .iter()
        .map(|strip| {
            let points: Vec<[C; 3]> = strip.iter().map(|&i| grid.cpoint(i)).collect();
            solve_strip(g, lambdas, &points, opts, method)
        })
        .collect();
    Ok(assemble_wave_field(*grid, &strips, results))
}
