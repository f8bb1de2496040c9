//! Pointwise access to solutions: closed-form fixtures, reparameterizations
//! and interpolated grid data.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Debug;

#[allow(unused_imports)]
use num_traits::Float;

use super::field::{is_finite, ScalarField3};
use super::PdeError;
use crate::C;

/// Where an oracle's values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Closed form, valid at complex points.
    Analytic,
    /// Interpolated samples, valid at real points inside the grid only.
    Grid,
}

/// A solution `w(x, y, z)` evaluated pointwise.
///
/// Analytic oracles accept complex coordinates. Second derivatives are
/// optional and ordered `(w_yz, w_xz, w_xy)`.
pub trait SolutionOracle: Send + Sync + Debug {
    fn value(&self, p: [C; 3]) -> C;
    fn gradient(&self, p: [C; 3]) -> [C; 3];
    fn mixed(&self, _p: [C; 3]) -> Option<[C; 3]> {
        None
    }
    fn provenance(&self) -> Provenance {
        Provenance::Analytic
    }
}

/// `w = a·x + b·y + c·z + d`, a solution of every (A,B,C)-equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    pub coeffs: [C; 3],
    pub offset: C,
}

impl SolutionOracle for Linear {
    fn value(&self, p: [C; 3]) -> C {
        self.coeffs[0] * p[0] + self.coeffs[1] * p[1] + self.coeffs[2] * p[2] + self.offset
    }
    fn gradient(&self, _p: [C; 3]) -> [C; 3] {
        self.coeffs
    }
    fn mixed(&self, _p: [C; 3]) -> Option<[C; 3]> {
        Some([C::new(0.0, 0.0); 3])
    }
}

/// Profiles of traveling waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Exp,
    Sin,
    /// `s + s³`
    Cubic,
}

impl Profile {
    /// `(f, f′, f″)` at `s`.
    pub fn jet(&self, s: C) -> [C; 3] {
        match self {
            Profile::Exp => {
                let e = s.exp();
                [e, e, e]
            }
            Profile::Sin => [s.sin(), s.cos(), -s.sin()],
            Profile::Cubic => [s + s * s * s, 1.0 + 3.0 * s * s, 6.0 * s],
        }
    }
}

/// `w = f(k·p)`. Every term of the equation equals `f′f″·kx·ky·kz` times its
/// coefficient, so these solve every (A,B,C)-equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelingWave {
    pub k: [C; 3],
    pub profile: Profile,
}

impl TravelingWave {
    fn phase(&self, p: [C; 3]) -> C {
        self.k[0] * p[0] + self.k[1] * p[1] + self.k[2] * p[2]
    }
}

impl SolutionOracle for TravelingWave {
    fn value(&self, p: [C; 3]) -> C {
        self.profile.jet(self.phase(p))[0]
    }
    fn gradient(&self, p: [C; 3]) -> [C; 3] {
        let d = self.profile.jet(self.phase(p))[1];
        self.k.map(|k| d * k)
    }
    fn mixed(&self, p: [C; 3]) -> Option<[C; 3]> {
        let d2 = self.profile.jet(self.phase(p))[2];
        let k = self.k;
        Some([d2 * k[1] * k[2], d2 * k[0] * k[2], d2 * k[0] * k[1]])
    }
}

/// Holomorphic maps of one variable used for gauge transforms and
/// coordinate reparameterizations.
#[derive(Debug, Clone, PartialEq)]
pub enum Map1 {
    /// `Σ c_k t^k`, lowest degree first.
    Poly(Vec<C>),
    /// `tanh(t)`
    Tanh,
    /// `exp(t)`
    Exp,
}

impl Map1 {
    pub fn identity() -> Self {
        Map1::Poly(alloc::vec![C::new(0.0, 0.0), C::new(1.0, 0.0)])
    }

    /// `(τ, τ′, τ″)` at `t`.
    pub fn jet(&self, t: C) -> [C; 3] {
        match self {
            Map1::Poly(c) => {
                let mut v = [C::new(0.0, 0.0); 3];
                for &ck in c.iter().rev() {
                    v[2] = v[2] * t + 2.0 * v[1];
                    v[1] = v[1] * t + v[0];
                    v[0] = v[0] * t + ck;
                }
                v
            }
            Map1::Tanh => {
                let th = t.tanh();
                let sech2 = 1.0 - th * th;
                [th, sech2, -2.0 * th * sech2]
            }
            Map1::Exp => {
                let e = t.exp();
                [e, e, e]
            }
        }
    }

    pub fn eval(&self, t: C) -> C {
        self.jet(t)[0]
    }
}

/// `w(x, y, z) = ψ(u(φ1(x), φ2(y), φ3(z)))`.
#[derive(Debug, Clone)]
pub struct Reparameterized {
    pub inner: Arc<dyn SolutionOracle>,
    pub outer: Map1,
    pub coords: [Map1; 3],
}

impl Reparameterized {
    fn inner_point(&self, p: [C; 3]) -> ([C; 3], [C; 3]) {
        let jets = [0, 1, 2].map(|k| self.coords[k].jet(p[k]));
        (jets.map(|j| j[0]), jets.map(|j| j[1]))
    }
}

impl SolutionOracle for Reparameterized {
    fn value(&self, p: [C; 3]) -> C {
        let (q, _) = self.inner_point(p);
        self.outer.eval(self.inner.value(q))
    }
    fn gradient(&self, p: [C; 3]) -> [C; 3] {
        let (q, dphi) = self.inner_point(p);
        let d = self.outer.jet(self.inner.value(q))[1];
        let g = self.inner.gradient(q);
        [0, 1, 2].map(|k| d * g[k] * dphi[k])
    }
    fn mixed(&self, p: [C; 3]) -> Option<[C; 3]> {
        let (q, dphi) = self.inner_point(p);
        let [_, d1, d2] = self.outer.jet(self.inner.value(q));
        let g = self.inner.gradient(q);
        let m = self.inner.mixed(q)?;
        // (yz, xz, xy) pairs
        let pairs = [(1, 2), (0, 2), (0, 1)];
        Some([0, 1, 2].map(|k| {
            let (a, b) = pairs[k];
            (d2 * g[a] * g[b] + d1 * m[k]) * dphi[a] * dphi[b]
        }))
    }
    fn provenance(&self) -> Provenance {
        self.inner.provenance()
    }
}

/// `τ ∘ w`, again a solution of the same equation.
pub fn gauge_transform(w: Arc<dyn SolutionOracle>, tau: Map1) -> Reparameterized {
    Reparameterized {
        inner: w,
        outer: tau,
        coords: [Map1::identity(), Map1::identity(), Map1::identity()],
    }
}

/// Named closed-form solutions: `linear` (`a·x + b·y + c·z`) and traveling
/// waves `exp`, `sin`, `cubic` with wave vector `(a, b, c)`.
pub fn fixture(name: &str, coeffs: [C; 3]) -> Result<Arc<dyn SolutionOracle>, PdeError> {
    let wave = |profile| -> Arc<dyn SolutionOracle> { Arc::new(TravelingWave { k: coeffs, profile }) };
    Ok(match name {
        "linear" => Arc::new(Linear {
            coeffs,
            offset: C::new(0.0, 0.0),
        }),
        "exp" => wave(Profile::Exp),
        "sin" => wave(Profile::Sin),
        "cubic" => wave(Profile::Cubic),
        other => return Err(PdeError::UnknownFixture(other.to_string())),
    })
}

/// Trilinear interpolation of sampled values and of their central-difference
/// gradient. Valid at real points inside the grid; anything else is NaN.
#[derive(Debug, Clone)]
pub struct GridOracle {
    field: ScalarField3,
    grad: [Vec<C>; 3],
}

impl GridOracle {
    pub fn new(field: ScalarField3) -> Result<Self, PdeError> {
        field.require_interior()?;
        let g = *field.grid();
        let mut grad: [Vec<C>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (axis, out) in grad.iter_mut().enumerate() {
            *out = (0..g.len())
                .map(|i| {
                    let mut ijk = g.unravel(i);
                    let n = g.shape[axis];
                    let h = g.spacing[axis];
                    let at = |ijk: [usize; 3]| field.get(ijk[0], ijk[1], ijk[2]);
                    let pos = ijk[axis];
                    let mut stencil = |offs: [usize; 3], w: [f64; 3]| {
                        let mut acc = C::new(0.0, 0.0);
                        for (o, c) in offs.iter().zip(w) {
                            ijk[axis] = *o;
                            acc += at(ijk) * c;
                        }
                        acc / h
                    };
                    if pos == 0 {
                        stencil([0, 1, 2], [-1.5, 2.0, -0.5])
                    } else if pos + 1 == n {
                        stencil([n - 3, n - 2, n - 1], [0.5, -2.0, 1.5])
                    } else {
                        stencil([pos - 1, pos, pos + 1], [-0.5, 0.0, 0.5])
                    }
                })
                .collect();
        }
        Ok(Self { field, grad })
    }

    fn interpolate(&self, data: &[C], p: [C; 3]) -> C {
        let nan = C::new(f64::NAN, f64::NAN);
        if p.iter().any(|z| z.im != 0.0) {
            return nan;
        }
        let g = self.field.grid();
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..3 {
            let u = (p[a].re - g.origin[a]) / g.spacing[a];
            let last = (g.shape[a] - 1) as f64;
            if !(u >= -1e-12 && u <= last + 1e-12) {
                return nan;
            }
            let u = u.clamp(0.0, last);
            let i0 = (u.floor() as usize).min(g.shape[a].saturating_sub(2));
            base[a] = i0;
            frac[a] = u - i0 as f64;
        }
        let mut acc = C::new(0.0, 0.0);
        for corner in 0..8 {
            let mut w = 1.0;
            let mut ijk = base;
            for a in 0..3 {
                if corner >> a & 1 == 1 {
                    ijk[a] += 1;
                    w *= frac[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            if w != 0.0 {
                acc += data[g.index(ijk[0], ijk[1], ijk[2])] * w;
            }
        }
        if is_finite(acc) {
            acc
        } else {
            nan
        }
    }
}

impl SolutionOracle for GridOracle {
    fn value(&self, p: [C; 3]) -> C {
        self.interpolate(self.field.values(), p)
    }
    fn gradient(&self, p: [C; 3]) -> [C; 3] {
        [0, 1, 2].map(|a| self.interpolate(&self.grad[a], p))
    }
    fn provenance(&self) -> Provenance {
        Provenance::Grid
    }
}
