//! Continuation along a family `g_κ`, `κ ∈ [0, 1]`, whose `κ = 0` member is
//! solved by `σ ≡ 0`.
//!
//! Differentiating `σ₋ = g_κ(λ, σ₊)` in `κ` gives the linear problem
//! `σ̇₋ − φ·σ̇₊ = ∂g_κ/∂κ` with `φ = ∂g_κ/∂t = λ·a₊/a₋`. Splitting
//! `(B₊, B₋) = ℍ(a₋·∂g_κ/∂κ)` yields `σ̇₊ = −a₊⁻¹B₊` and `σ̇₋ = +a₋⁻¹B₋`.
//! The velocity is integrated by classical RK4 and the endpoint is polished
//! by Newton iteration.

use super::{solve_riemann_newton, GluingFunction, RiemannSolution, SolveError, SolverOptions};
use crate::annulus::{birkhoff_factor_with, h_split, node, CircleFunction, KernelError};
use crate::scaffold::ScaffoldedGluing;
use crate::C;

/// A one-parameter family of gluing functions.
pub trait GluingPath: Send + Sync {
    fn eval(&self, lambda: C, t: C, kappa: f64) -> C;
    fn dt(&self, lambda: C, t: C, kappa: f64) -> C;
    fn dkappa(&self, lambda: C, t: C, kappa: f64) -> C;
    fn admits(&self, lambda: C, t: C, kappa: f64) -> bool;
    fn delta(&self) -> f64;
}

/// `g(λ, t) − (1 − κ)·g(λ, 0)`.
pub struct OffsetPath<'g> {
    g: &'g dyn GluingFunction,
}

impl core::fmt::Debug for OffsetPath<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("OffsetPath").finish_non_exhaustive()
    }
}

impl<'g> OffsetPath<'g> {
    pub fn new(g: &'g dyn GluingFunction) -> Self {
        Self { g }
    }
}

impl GluingPath for OffsetPath<'_> {
    fn eval(&self, lambda: C, t: C, kappa: f64) -> C {
        self.g.eval(lambda, t) - self.g.eval(lambda, C::new(0.0, 0.0)) * (1.0 - kappa)
    }
    fn dt(&self, lambda: C, t: C, _kappa: f64) -> C {
        self.g.dt(lambda, t)
    }
    fn dkappa(&self, lambda: C, _t: C, _kappa: f64) -> C {
        self.g.eval(lambda, C::new(0.0, 0.0))
    }
    fn admits(&self, lambda: C, t: C, _kappa: f64) -> bool {
        self.g.admits(lambda, t)
    }
    fn delta(&self) -> f64 {
        self.g.delta()
    }
}

/// A scaffold whose boundary values are scaled by `κ`. For a zero-preserving
/// base the `κ = 0` member is solved by `σ ≡ 0`.
#[derive(Debug)]
pub struct ScaffoldPath<'s, 'g> {
    scaffold: &'s ScaffoldedGluing<'g>,
}

impl<'s, 'g> ScaffoldPath<'s, 'g> {
    pub fn new(scaffold: &'s ScaffoldedGluing<'g>) -> Self {
        Self { scaffold }
    }
}

impl GluingPath for ScaffoldPath<'_, '_> {
    fn eval(&self, lambda: C, t: C, kappa: f64) -> C {
        self.scaffold.eval_scaled(lambda, t, kappa)
    }
    fn dt(&self, lambda: C, t: C, kappa: f64) -> C {
        self.scaffold.dt_scaled(lambda, t, kappa)
    }
    fn dkappa(&self, lambda: C, t: C, kappa: f64) -> C {
        self.scaffold.dkappa(lambda, t, kappa)
    }
    fn admits(&self, lambda: C, t: C, kappa: f64) -> bool {
        self.scaffold.admits_scaled(lambda, t, kappa)
    }
    fn delta(&self) -> f64 {
        f64::INFINITY
    }
}

/// One member `g_κ` of a path, viewed as a gluing function.
pub struct PathSlice<'p> {
    path: &'p dyn GluingPath,
    kappa: f64,
}

impl core::fmt::Debug for PathSlice<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PathSlice").field("kappa", &self.kappa).finish_non_exhaustive()
    }
}

impl<'p> PathSlice<'p> {
    pub fn new(path: &'p dyn GluingPath, kappa: f64) -> Self {
        Self { path, kappa }
    }
}

impl GluingFunction for PathSlice<'_> {
    fn eval(&self, lambda: C, t: C) -> C {
        self.path.eval(lambda, t, self.kappa)
    }
    fn dt(&self, lambda: C, t: C) -> C {
        self.path.dt(lambda, t, self.kappa)
    }
    fn delta(&self) -> f64 {
        self.path.delta()
    }
    fn admits(&self, lambda: C, t: C) -> bool {
        self.path.admits(lambda, t, self.kappa)
    }
}

type Section = (CircleFunction, CircleFunction);

fn sampled(
    path: &dyn GluingPath,
    sp: &CircleFunction,
    kappa: f64,
    f: impl Fn(C, C) -> C,
) -> Result<CircleFunction, SolveError> {
    let n = sp.half_order();
    let mut out = alloc::vec::Vec::with_capacity(sp.len());
    for (j, &t) in sp.samples().iter().enumerate() {
        let l = node(n, j);
        if !path.admits(l, t, kappa) {
            return Err(SolveError::PathLeftValidityRegion {
                kappa,
                source: KernelError::TArgumentOutOfDisk {
                    sample: j,
                    modulus: t.norm(),
                    delta: path.delta(),
                },
            });
        }
        out.push(f(l, t));
    }
    Ok(CircleFunction::from_samples(n, out))
}

fn velocity(path: &dyn GluingPath, sp: &CircleFunction, kappa: f64, opts: &SolverOptions) -> Result<Section, SolveError> {
    let phi = sampled(path, sp, kappa, |l, t| path.dt(l, t, kappa))?;
    let dk = sampled(path, sp, kappa, |l, t| path.dkappa(l, t, kappa))?;
    let f = birkhoff_factor_with(&phi, &opts.index)
        .map_err(|source| SolveError::PathLeftValidityRegion { kappa, source })?;
    if f.index != 1 {
        return Err(SolveError::PathIndexChanged { kappa, index: f.index });
    }
    let (bp, bm) = h_split(&(&f.minus * &dk));
    let vp = (&f.plus_inv * &bp).scale(C::new(-1.0, 0.0)).nonnegative_part();
    let vm = (&f.minus_inv * &bm).nonpositive_part();
    Ok((vp, vm))
}

fn axpy(base: &Section, h: f64, v: &Section) -> Section {
    let s = C::new(h, 0.0);
    (&base.0 + &v.0.scale(s), &base.1 + &v.1.scale(s))
}

/// Integrates the section from `κ = 0` to `κ = 1` without the final Newton
/// polish.
pub fn integrate_homotopy(path: &dyn GluingPath, opts: &SolverOptions) -> Result<Section, SolveError> {
    let n = opts.half_order;
    let zero = CircleFunction::zero(n);
    let start = sampled(path, &zero, 0.0, |l, t| path.eval(l, t, 0.0))?;
    let residual = start.max_abs();
    if !(residual <= opts.tol.max(1e-14)) {
        return Err(SolveError::PathStartNotSolved { residual });
    }
    let steps = opts.homotopy_steps.max(1);
    let h = 1.0 / steps as f64;
    let mut y: Section = (zero.clone(), zero);
    for k in 0..steps {
        let kappa = k as f64 * h;
        let k1 = velocity(path, &y.0, kappa, opts)?;
        let y2 = axpy(&y, 0.5 * h, &k1);
        let k2 = velocity(path, &y2.0, kappa + 0.5 * h, opts)?;
        let y3 = axpy(&y, 0.5 * h, &k2);
        let k3 = velocity(path, &y3.0, kappa + 0.5 * h, opts)?;
        let y4 = axpy(&y, h, &k3);
        let k4 = velocity(path, &y4.0, kappa + h, opts)?;
        let step = (
            &(&k1.0 + &k2.0.scale(C::new(2.0, 0.0))) + &(&k3.0.scale(C::new(2.0, 0.0)) + &k4.0),
            &(&k1.1 + &k2.1.scale(C::new(2.0, 0.0))) + &(&k3.1.scale(C::new(2.0, 0.0)) + &k4.1),
        );
        y = axpy(&y, h / 6.0, &step);
    }
    Ok(y)
}

/// Homotopy continuation followed by a Newton polish at `κ = 1`.
pub fn solve_riemann_homotopy(path: &dyn GluingPath, opts: &SolverOptions) -> Result<RiemannSolution, SolveError> {
    let (sp, sm) = integrate_homotopy(path, opts)?;
    let seed = RiemannSolution {
        sigma_plus: sp,
        sigma_minus: sm,
        residual_norm: f64::NAN,
        newton_iters: 0,
    };
    solve_riemann_newton(&PathSlice::new(path, 1.0), opts, Some(&seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::compose_gluing;
    use crate::riemann::{riemann_transform, FnGluing, Method, PolynomialGluing};
    use crate::scaffold::wave_scaffold;
    use crate::testutil::{c, close};

    #[test]
    fn homotopy_matches_newton_on_scaffold() {
        let base = PolynomialGluing::new(-2, [c(1.0, 0.0), c(0.1, 0.0)], 10.0);
        let s = wave_scaffold(&base, [c(0.1, 0.0), c(0.2, 0.0), c(10.0, 0.0)], [c(0.005, 0.0), c(-0.0025, 0.0), c(0.004, 0.0)]).unwrap();
        let opts = SolverOptions::default();
        let newton = solve_riemann_newton(&s, &opts, None).unwrap();
        let path = ScaffoldPath::new(&s);
        let (sp, sm) = integrate_homotopy(&path, &opts).unwrap();
        // RK4 alone is already close; the polish only removes truncation error.
        assert!(close(sp.mode(0), newton.transform_value(), 1e-8));
        let r = (&compose_gluing(&s, &sp).unwrap() - &sm).max_abs();
        assert!(r < 1e-8, "unpolished residual {r:e}");
        let polished = solve_riemann_homotopy(&path, &opts).unwrap();
        assert!(close(polished.transform_value(), newton.transform_value(), 1e-12));
    }

    #[test]
    fn offset_path_on_affine_problem() {
        let g = FnGluing::new(|l: C, t: C| l * t + l * 0.3 + 0.2, |l: C, _| l, 10.0);
        let w = riemann_transform(&g, Method::Homotopy, &SolverOptions::default()).unwrap();
        assert!(close(w, c(-0.3, 0.0), 1e-12));
    }

    #[test]
    fn fold_along_the_path_is_an_error() {
        // Constant sections solve s − 2s² = 0.6κ, which folds at κ = 5/24 where ∂g/∂t vanishes.
        let g = FnGluing::new(|l: C, t: C| l * (t - 2.0 * t * t) - l * 0.6, |l: C, t: C| l * (1.0 - 4.0 * t), 10.0);
        let r = solve_riemann_homotopy(&OffsetPath::new(&g), &SolverOptions::default());
        assert!(r.is_err(), "{r:?}");
    }
}
