//! Newton iteration for the Riemann problem.
//!
//! With `R = g(λ, σ₊) − σ₋` and `φ = ∂g/∂t(λ, σ₊) = λ·a₊/a₋`, the linearized
//! problem `δσ₋ − φ·δσ₊ = −R` is solved exactly by splitting `a₋R`:
//! `(h₊, h₋) = ℍ(a₋R)` gives `δσ₊ = −a₊⁻¹h₊` and `δσ₋ = +a₋⁻¹h₋`.

use super::{GluingFunction, RiemannSolution, SolveError, SolverOptions};
use crate::annulus::{
    birkhoff_factor_with, compose_gluing, compose_gluing_dt, h_split, winding_index_with, CircleFunction, TAIL_THRESHOLD,
};

/// Solves `σ₋ = g(λ, σ₊)` starting from `init`, or from zero.
pub fn solve_riemann_newton(
    g: &dyn GluingFunction,
    opts: &SolverOptions,
    init: Option<&RiemannSolution>,
) -> Result<RiemannSolution, SolveError> {
    let n = opts.half_order;
    let (mut sp, mut sm) = match init {
        Some(s) if s.sigma_plus.half_order() == n => (
            s.sigma_plus.nonnegative_part(),
            s.sigma_minus.nonpositive_part(),
        ),
        _ => (CircleFunction::zero(n), CircleFunction::zero(n)),
    };
    let mut iter = 0;
    loop {
        let gs = compose_gluing(g, &sp)?;
        let r = &gs - &sm;
        let residual = r.max_abs();
        if !residual.is_finite() {
            return Err(SolveError::NonFinite);
        }
        let phi = compose_gluing_dt(g, &sp)?;
        if residual <= opts.tol {
            let index = winding_index_with(&phi, &opts.index)?;
            if index != 1 {
                return Err(SolveError::IndexNotOne(index));
            }
            check_pair_tail(&sp, &sm, opts.tol)?;
            return Ok(RiemannSolution {
                sigma_plus: sp,
                sigma_minus: sm,
                residual_norm: residual,
                newton_iters: iter,
            });
        }
        if iter == opts.max_iters {
            return Err(SolveError::MaxItersExceeded {
                iters: iter,
                residual,
            });
        }
        let f = birkhoff_factor_with(&phi, &opts.index)?;
        if f.index != 1 {
            return Err(SolveError::IndexNotOne(f.index));
        }
        let (hp, hm) = h_split(&(&f.minus * &r));
        sp = (&sp - &(&f.plus_inv * &hp)).nonnegative_part();
        sm = (&sm + &(&f.minus_inv * &hm)).nonpositive_part();
        iter += 1;
    }
}

/// Tail check on the solution pair. Mass below the solve tolerance is
/// rounding noise, so it is ignored.
fn check_pair_tail(sp: &CircleFunction, sm: &CircleFunction, tol: f64) -> Result<(), SolveError> {
    let (tp, np) = sp.tail_mass();
    let (tm, nm) = sm.tail_mass();
    let tail = tp + tm;
    if tail > TAIL_THRESHOLD * (np + nm) + tol {
        return Err(SolveError::SpectralTailTooFat {
            ratio: tail / (np + nm),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::{FnGluing, MobiusShifted, PolynomialGluing};
    use crate::scaffold::wave_scaffold;
    use crate::testutil::{c, close};
    use crate::C;

    #[test]
    fn zero_data_needs_no_iterations() {
        let g = PolynomialGluing::new(1, [c(1.0, 0.0)], 1.0);
        let s = solve_riemann_newton(&g, &SolverOptions::default(), None).unwrap();
        assert_eq!(s.newton_iters, 0);
        assert_eq!(s.transform_value(), c(0.0, 0.0));
    }

    #[test]
    fn affine_problem_converges_in_one_step() {
        // σ₋ = λ(σ₊ + c(λ)) with c = 0.3 + 0.2/λ: σ₊ = −0.3, σ₋ = 0.2.
        let g = FnGluing::new(|l: C, t: C| l * t + l * 0.3 + 0.2, |l: C, _| l, 10.0);
        let s = solve_riemann_newton(&g, &SolverOptions::default(), None).unwrap();
        assert!(s.newton_iters <= 1);
        assert!(close(s.transform_value(), c(-0.3, 0.0), 1e-13));
        assert!(close(s.sigma_minus.mode(0), c(0.2, 0.0), 1e-13));
    }

    #[test]
    fn linear_wave_oracle() {
        // g = λ⁻²t: σ₊ = c0 + c1λ + c2λ² with σ₊(λ_i) = x, y and σ₊(λ3)/λ3² = z.
        let g = PolynomialGluing::new(-2, [c(1.0, 0.0)], 10.0);
        let (x, y, z) = (c(0.013, 0.0), c(-0.007, 0.0), c(0.011, 0.0));
        let s = wave_scaffold(&g, [c(0.1, 0.0), c(0.2, 0.0), c(10.0, 0.0)], [x, y, z]).unwrap();
        let sol = solve_riemann_newton(&s, &SolverOptions::default(), None).unwrap();
        assert!(sol.newton_iters <= 3);
        let w = sol.transform_value();
        // Vandermonde solve by hand, in closed form.
        // p(0.1) = x, p(0.2) = y, p(10) = 100 z
        let (a, b, d) = (0.1, 0.2, 10.0);
        let p = [x, y, z * 100.0];
        let nodes = [a, b, d];
        let mut c0 = c(0.0, 0.0);
        for i in 0..3 {
            let mut l0 = 1.0;
            for j in 0..3 {
                if i != j {
                    l0 *= (0.0 - nodes[j]) / (nodes[i] - nodes[j]);
                }
            }
            c0 += p[i] * l0;
        }
        assert!(close(w, c0, 1e-12));
    }

    #[test]
    fn wrong_index_is_rejected() {
        let g = PolynomialGluing::new(-2, [c(1.0, 0.0)], 10.0);
        assert!(matches!(
            solve_riemann_newton(&g, &SolverOptions::default(), None),
            Err(SolveError::IndexNotOne(-2))
        ));
    }

    #[test]
    fn leaving_the_disk_is_reported() {
        let g = FnGluing::new(|l: C, t: C| l * t + l * 5.0, |l: C, _| l, 1.0);
        assert!(matches!(
            solve_riemann_newton(&g, &SolverOptions::default(), None),
            Err(SolveError::LeftTDisk { .. })
        ));
    }

    #[test]
    fn newton_converges_quadratically_on_nonlinear_problem() {
        let base = PolynomialGluing::new(-2, [c(1.0, 0.0), c(0.1, 0.0)], 10.0);
        let s = wave_scaffold(&base, [c(0.1, 0.0), c(0.2, 0.0), c(10.0, 0.0)], [c(0.01, 0.0), c(0.0075, 0.0), c(-0.005, 0.0)]).unwrap();
        let sol = solve_riemann_newton(&s, &SolverOptions::default(), None).unwrap();
        assert!(sol.newton_iters <= 6, "{} iterations", sol.newton_iters);
        assert!(sol.residual_norm <= 1e-12);
    }

    #[test]
    fn mobius_shift_evaluates_section_at_mu() {
        let base = PolynomialGluing::new(-2, [c(1.0, 0.0), c(0.1, 0.0)], 10.0);
        let s = wave_scaffold(&base, [c(0.1, 0.0), c(0.2, 0.0), c(10.0, 0.0)], [c(0.005, 0.0), c(0.0025, 0.0), c(0.00125, 0.0)]).unwrap();
        let opts = SolverOptions::default();
        let sol = solve_riemann_newton(&s, &opts, None).unwrap();
        let mu = c(0.1, 0.05);
        let shifted = MobiusShifted::new(&s, mu).unwrap();
        let sol2 = solve_riemann_newton(&shifted, &opts, None).unwrap();
        assert!(close(sol2.transform_value(), sol.sigma_plus.eval(mu), 1e-10));
    }
}
