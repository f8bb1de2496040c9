//! Complex scalar fields on uniform 3D grids and their central differences.

use alloc::vec::Vec;

use super::PdeError;
use crate::C;

/// A uniform grid, row-major with `z` fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub shape: [usize; 3],
}

impl Grid3 {
    pub fn new(origin: [f64; 3], spacing: [f64; 3], shape: [usize; 3]) -> Result<Self, PdeError> {
        let spacing_ok = spacing.iter().all(|h| h.is_finite() && *h > 0.0);
        let origin_ok = origin.iter().all(|o| o.is_finite());
        if !spacing_ok || !origin_ok || shape.contains(&0) {
            return Err(PdeError::InvalidGrid);
        }
        Ok(Self { origin, spacing, shape })
    }

    /// The cube `[−radius, radius]³` with `n` points per axis. A single point
    /// sits at the origin.
    pub fn centered(radius: f64, n: usize) -> Result<Self, PdeError> {
        if n == 0 || !(radius >= 0.0) || !radius.is_finite() {
            return Err(PdeError::InvalidGrid);
        }
        if n == 1 {
            return Self::new([0.0; 3], [1.0; 3], [1; 3]);
        }
        let h = 2.0 * radius / (n - 1) as f64;
        Self::new([-radius; 3], [h; 3], [n; 3])
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        debug_assert!(ix < self.shape[0] && iy < self.shape[1] && iz < self.shape[2]);
        (ix * self.shape[1] + iy) * self.shape[2] + iz
    }

    pub fn unravel(&self, i: usize) -> [usize; 3] {
        let iz = i % self.shape[2];
        let rest = i / self.shape[2];
        [rest / self.shape[1], rest % self.shape[1], iz]
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + self.spacing[axis] * i as f64
    }

    pub fn point(&self, i: usize) -> [f64; 3] {
        let ijk = self.unravel(i);
        [0, 1, 2].map(|a| self.coord(a, ijk[a]))
    }

    /// Grid point as a complex coordinate triple.
    pub fn cpoint(&self, i: usize) -> [C; 3] {
        self.point(i).map(|v| C::new(v, 0.0))
    }

    /// Whether the point has a neighbour on both sides along every axis.
    pub fn is_interior(&self, i: usize) -> bool {
        let ijk = self.unravel(i);
        (0..3).all(|a| ijk[a] >= 1 && ijk[a] + 1 < self.shape[a])
    }
}

/// First and mixed second derivatives at one point.
///
/// `mixed` is ordered `(w_yz, w_xz, w_xy)` so that `grad[k]·mixed[k]` is the
/// `k`-th term of the equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldDerivatives {
    pub grad: [C; 3],
    pub mixed: [C; 3],
}

/// Complex samples on a [`Grid3`]. Points without a value hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField3 {
    grid: Grid3,
    values: Vec<C>,
}

fn nan() -> C {
    C::new(f64::NAN, f64::NAN)
}

pub(crate) fn is_finite(z: C) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl ScalarField3 {
    pub fn new(grid: Grid3, values: Vec<C>) -> Result<Self, PdeError> {
        if values.len() != grid.len() {
            return Err(PdeError::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> C) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, values }
    }

    pub fn filled_nan(grid: Grid3) -> Self {
        Self {
            grid,
            values: alloc::vec![nan(); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn values(&self) -> &[C] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C] {
        &mut self.values
    }

    pub fn get(&self, ix: usize, iy: usize, iz: usize) -> C {
        self.values[self.grid.index(ix, iy, iz)]
    }

    pub fn is_valid(&self, i: usize) -> bool {
        is_finite(self.values[i])
    }

    /// Largest `|a − b|` over points valid in both fields.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, PdeError> {
        if self.grid != other.grid {
            return Err(PdeError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| is_finite(**a) && is_finite(**b))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Central-difference derivatives at an interior point. `None` on the
    /// boundary ring or when a stencil value is missing.
    pub fn derivatives_at(&self, i: usize) -> Option<FieldDerivatives> {
        if !self.grid.is_interior(i) {
            return None;
        }
        let [ix, iy, iz] = self.grid.unravel(i);
        let h = self.grid.spacing;
        let v = |dx: isize, dy: isize, dz: isize| -> C {
            self.get(
                (ix as isize + dx) as usize,
                (iy as isize + dy) as usize,
                (iz as isize + dz) as usize,
            )
        };
        let grad = [
            (v(1, 0, 0) - v(-1, 0, 0)) / (2.0 * h[0]),
            (v(0, 1, 0) - v(0, -1, 0)) / (2.0 * h[1]),
            (v(0, 0, 1) - v(0, 0, -1)) / (2.0 * h[2]),
        ];
        let mixed_of = |a: [isize; 3], b: [isize; 3], ha: f64, hb: f64| -> C {
            let at = |sa: isize, sb: isize| {
                v(sa * a[0] + sb * b[0], sa * a[1] + sb * b[1], sa * a[2] + sb * b[2])
            };
            (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * ha * hb)
        };
        let (ex, ey, ez) = ([1, 0, 0], [0, 1, 0], [0, 0, 1]);
        let mixed = [
            mixed_of(ey, ez, h[1], h[2]),
            mixed_of(ex, ez, h[0], h[2]),
            mixed_of(ex, ey, h[0], h[1]),
        ];
        let all_finite = grad.iter().chain(mixed.iter()).all(|z| is_finite(*z));
        all_finite.then_some(FieldDerivatives { grad, mixed })
    }

    /// Central-difference gradient. `None` on the boundary ring or when a
    /// stencil value is missing.
    pub fn gradient_at(&self, i: usize) -> Option<[C; 3]> {
        self.derivatives_at(i).map(|d| d.grad)
    }

    pub(crate) fn require_interior(&self) -> Result<(), PdeError> {
        if self.grid.shape.iter().any(|&n| n < 3) {
            return Err(PdeError::GridTooSmall(self.grid.shape));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::close;

    #[test]
    fn index_round_trip() {
        let g = Grid3::new([0.0; 3], [1.0; 3], [3, 4, 5]).unwrap();
        for i in 0..g.len() {
            let [a, b, c] = g.unravel(i);
            assert_eq!(g.index(a, b, c), i);
        }
        assert_eq!(g.unravel(1), [0, 0, 1]);
    }

    #[test]
    fn centered_grid_spans_the_box() {
        let g = Grid3::centered(0.02, 5).unwrap();
        assert_eq!(g.point(0), [-0.02; 3]);
        let last = g.point(g.len() - 1);
        assert!(last.iter().all(|v| (v - 0.02).abs() < 1e-17));
        assert!(Grid3::centered(0.1, 0).is_err());
    }

    #[test]
    fn differences_are_exact_on_quadratics() {
        let g = Grid3::centered(1.0, 5).unwrap();
        let f = ScalarField3::from_fn(g, |[x, y, z]| C::new(x * y + 2.0 * y * z - x * z + x * x, z));
        let i = g.index(2, 1, 3);
        let [x, y, z] = g.point(i);
        let d = f.derivatives_at(i).unwrap();
        assert!(close(d.grad[0], C::new(y - z + 2.0 * x, 0.0), 1e-13));
        assert!(close(d.grad[1], C::new(x + 2.0 * z, 0.0), 1e-13));
        assert!(close(d.grad[2], C::new(2.0 * y - x, 1.0), 1e-13));
        assert!(close(d.mixed[0], C::new(2.0, 0.0), 1e-13));
        assert!(close(d.mixed[1], C::new(-1.0, 0.0), 1e-13));
        assert!(close(d.mixed[2], C::new(1.0, 0.0), 1e-13));
        assert!(f.derivatives_at(g.index(0, 2, 2)).is_none());
    }

    #[test]
    fn missing_values_propagate_as_none() {
        let g = Grid3::centered(1.0, 3).unwrap();
        let mut f = ScalarField3::from_fn(g, |_| C::new(1.0, 0.0));
        f.values_mut()[g.index(2, 1, 1)] = C::new(f64::NAN, 0.0);
        assert!(f.derivatives_at(g.index(1, 1, 1)).is_none());
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let g = Grid3::centered(1.0, 2).unwrap();
        assert_eq!(
            ScalarField3::new(g, alloc::vec![C::new(0.0, 0.0); 3]),
            Err(PdeError::ShapeMismatch { expected: 8, got: 3 })
        );
    }
}
