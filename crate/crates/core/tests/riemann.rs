//! Wave solutions from gluing functions: closed-form oracle, method
//! agreement, truncation and the PDE residual of the output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistor_core::pde::{abc_from_lambda_triple, equation_residual, Grid3};
use twistor_core::riemann::{wave_point, wave_solution, Method, PolynomialGluing, SolverOptions};
use twistor_core::Complex64 as C;

const LAMBDAS: [C; 3] = [C::new(0.1, 0.0), C::new(0.2, 0.0), C::new(10.0, 0.0)];

/// `λ⁻²(t + ε·t²)`.
fn quadratic(eps: f64) -> PolynomialGluing {
    PolynomialGluing::new(-2, [C::new(1.0, 0.0), C::new(eps, 0.0)], 10.0)
}

fn random_point(rng: &mut ChaCha8Rng) -> [C; 3] {
    [0; 3].map(|_| C::new(rng.gen_range(-0.02..0.02), 0.0))
}

/// `q(0)` for the quadratic `q` with `q(λ1) = x`, `q(λ2) = y`, `q(λ3) = λ3²·z`.
fn interpolation_oracle([x, y, z]: [C; 3]) -> C {
    let nodes = LAMBDAS.map(|l| l.re);
    let values = [x, y, z * nodes[2] * nodes[2]];
    (0..3)
        .map(|i| {
            let basis: f64 = (0..3).filter(|&j| j != i).map(|j| -nodes[j] / (nodes[i] - nodes[j])).product();
            values[i] * basis
        })
        .sum()
}

#[test]
fn linear_gluing_matches_interpolation() {
    let g = quadratic(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let p = random_point(&mut rng);
        let sol = wave_point(&g, LAMBDAS, p, &SolverOptions::default(), Method::Newton, None).unwrap();
        assert!(sol.newton_iters <= 3);
        let expect = interpolation_oracle(p);
        assert!((sol.transform_value() - expect).norm() <= 1e-10 * (1.0 + expect.norm()));
    }
}

#[test]
fn newton_and_homotopy_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let g = quadratic(rng.gen_range(0.0..0.02));
        let p = random_point(&mut rng);
        let opts = SolverOptions::default();
        let a = wave_point(&g, LAMBDAS, p, &opts, Method::Newton, None).unwrap().transform_value();
        let b = wave_point(&g, LAMBDAS, p, &opts, Method::Homotopy, None).unwrap().transform_value();
        assert!((a - b).norm() <= 1e-8);
    }
}

#[test]
fn doubling_n_changes_nothing() {
    let g = quadratic(0.02);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let p = random_point(&mut rng);
        let at = |n| {
            let opts = SolverOptions { half_order: n, ..SolverOptions::default() };
            wave_point(&g, LAMBDAS, p, &opts, Method::Newton, None).unwrap().transform_value()
        };
        assert!((at(32) - at(64)).norm() <= 1e-9);
    }
}

#[test]
fn output_residual_is_second_order() {
    let g = quadratic(0.02);
    let abc = abc_from_lambda_triple(LAMBDAS[0], LAMBDAS[1], LAMBDAS[2]).unwrap();
    let residual = |n| {
        let grid = Grid3::centered(0.02, n).unwrap();
        let wf = wave_solution(&g, LAMBDAS, &grid, &SolverOptions::default(), Method::Newton).unwrap();
        assert!(wf.holes.is_empty());
        equation_residual(&wf.field, &abc).unwrap().scaled_max()
    };
    let (coarse, fine) = (residual(5), residual(9));
    assert!((coarse / fine).log2() >= 1.8, "{coarse:e} → {fine:e}");
}
