//! Residual operators of the equation, its linearization and the web forms.

use alloc::vec::Vec;

use super::abc::{ABCTriple, LambdaQuadruple};
use super::field::{Grid3, ScalarField3};
use super::oracle::SolutionOracle;
use super::PdeError;
use crate::C;

/// A residual sampled on a grid together with the size of the terms that
/// cancel in it. Points without a residual hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub residual: ScalarField3,
    /// Largest modulus of any single term over the valid points.
    pub term_scale: f64,
}

impl ResidualField {
    pub fn max_abs(&self) -> f64 {
        self.residual
            .values()
            .iter()
            .filter(|z| z.re.is_finite() && z.im.is_finite())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `max |residual| / term_scale`, the dimensionless residual size.
    pub fn scaled_max(&self) -> f64 {
        if self.term_scale == 0.0 {
            return self.max_abs();
        }
        self.max_abs() / self.term_scale
    }

    pub fn valid_points(&self) -> usize {
        (0..self.residual.grid().len())
            .filter(|&i| self.residual.is_valid(i))
            .count()
    }
}

fn terms(abc: &ABCTriple, grad: [C; 3], mixed: [C; 3]) -> [C; 3] {
    [
        abc.a * grad[0] * mixed[0],
        abc.b * grad[1] * mixed[1],
        abc.c * grad[2] * mixed[2],
    ]
}

fn assemble(grid: Grid3, per_point: impl Fn(usize) -> Option<[C; 3]>) -> ResidualField {
    let mut scale = 0.0f64;
    let values: Vec<C> = (0..grid.len())
        .map(|i| match per_point(i) {
            Some(t) => {
                scale = t.iter().map(|z| z.norm()).fold(scale, f64::max);
                t[0] + t[1] + t[2]
            }
            None => C::new(f64::NAN, f64::NAN),
        })
        .collect();
    ResidualField {
        residual: ScalarField3::new(grid, values).expect("one value per grid point"),
        term_scale: scale,
    }
}

/// `A·wx·wyz + B·wy·wxz + C·wz·wxy` by central differences on the interior.
pub fn equation_residual(w: &ScalarField3, abc: &ABCTriple) -> Result<ResidualField, PdeError> {
    w.require_interior()?;
    Ok(assemble(*w.grid(), |i| {
        w.derivatives_at(i).map(|d| terms(abc, d.grad, d.mixed))
    }))
}

/// The residual at one point from the oracle's analytic derivatives.
pub fn equation_residual_at(
    w: &dyn SolutionOracle,
    abc: &ABCTriple,
    p: [C; 3],
) -> Result<C, PdeError> {
    let mixed = w.mixed(p).ok_or(PdeError::MissingSecondDerivatives)?;
    let t = terms(abc, w.gradient(p), mixed);
    Ok(t[0] + t[1] + t[2])
}

/// `ν23·wx·wyz + ν31·wy·wxz + ν12·wz·wxy`.
pub fn frobenius_residual(
    w: &dyn SolutionOracle,
    quad: &LambdaQuadruple,
    p: [C; 3],
) -> Result<C, PdeError> {
    let nu = quad.nu()?;
    let mixed = w.mixed(p).ok_or(PdeError::MissingSecondDerivatives)?;
    let g = w.gradient(p);
    Ok(nu[0] * g[0] * mixed[0] + nu[1] * g[1] * mixed[1] + nu[2] * g[2] * mixed[2])
}

/// `p_i(λ) = (λ4−λ_i)(λ−λ_j)(λ−λ_k)` for `i = 1, 2, 3`.
pub fn veronese_p(lambda: C, quad: &LambdaQuadruple) -> [C; 3] {
    let l = quad.l;
    [
        (l[3] - l[0]) * (lambda - l[1]) * (lambda - l[2]),
        (l[3] - l[1]) * (lambda - l[0]) * (lambda - l[2]),
        (l[3] - l[2]) * (lambda - l[0]) * (lambda - l[1]),
    ]
}

/// The linearization of the equation at `w̄` applied to `w`:
/// `A·w̄x·wyz + B·w̄y·wxz + C·w̄z·wxy + A·w̄yz·wx + B·w̄xz·wy + C·w̄xy·wz`,
/// by central differences on the interior.
pub fn linearization_residual(
    wbar: &ScalarField3,
    w: &ScalarField3,
    abc: &ABCTriple,
) -> Result<ResidualField, PdeError> {
    if wbar.grid() != w.grid() {
        return Err(PdeError::GridMismatch);
    }
    w.require_interior()?;
    let coeff = abc.as_array();
    Ok(assemble(*w.grid(), |i| {
        let db = wbar.derivatives_at(i)?;
        let d = w.derivatives_at(i)?;
        let mut t = [C::new(0.0, 0.0); 3];
        for k in 0..3 {
            t[k] = coeff[k] * (db.grad[k] * d.mixed[k] + db.mixed[k] * d.grad[k]);
        }
        Some(t)
    }))
}

/// `A·w̄x·ηζ + B·w̄y·ξζ + C·w̄z·ξη` for the covector `(ξ, η, ζ)`.
pub fn principal_symbol(grad_wbar: [C; 3], covector: [C; 3], abc: &ABCTriple) -> C {
    let [xi, eta, zeta] = covector;
    abc.a * grad_wbar[0] * eta * zeta
        + abc.b * grad_wbar[1] * xi * zeta
        + abc.c * grad_wbar[2] * xi * eta
}
