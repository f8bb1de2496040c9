//! Splitting, factorization and index laws on random circle functions.

use proptest::prelude::*;
use twistor_core::annulus::{h_split, mult_split, winding_index, CircleFunction};
use twistor_core::riemann::{GluingFunction, PolynomialGluing};
use twistor_core::scaffold::wave_scaffold;
use twistor_core::Complex64 as C;

const N: usize = 32;

fn cpx(r: f64) -> impl Strategy<Value = C> {
    (-r..r, -r..r).prop_map(|(a, b)| C::new(a, b))
}

/// Random trigonometric polynomial with modes in `[-deg, deg]`.
fn trig(deg: i64, r: f64) -> impl Strategy<Value = CircleFunction> {
    proptest::collection::vec(cpx(r), (2 * deg + 1) as usize)
        .prop_map(move |c| CircleFunction::from_modes(N, (-deg..=deg).zip(c)))
}

/// A point off the unit circle, inside or outside.
fn off_circle() -> impl Strategy<Value = C> {
    (0.2f64..0.8, prop::bool::ANY, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, inside, th)| C::from_polar(if inside { r } else { 1.0 / r }, th))
}

proptest! {
    #[test]
    fn h_split_recombines_in_coefficients(phi in trig(20, 1.0)) {
        let (p, m) = h_split(&phi);
        for k in -(N as i64)..N as i64 {
            let back = if k >= 1 { p.mode(k - 1) } else { C::new(0.0, 0.0) } + m.mode(k);
            prop_assert!((back - phi.mode(k)).norm() <= 1e-15 * (1.0 + phi.mode(k).norm()));
        }
    }

    #[test]
    fn mult_split_reconstructs_index_zero(u in trig(6, 0.15)) {
        let phi = u.exp();
        let (p, m) = mult_split(&phi).unwrap();
        let back = &p * &m.map(|v| v.inv());
        for (a, b) in back.samples().iter().zip(phi.samples()) {
            prop_assert!((a - b).norm() <= 1e-11 * b.norm());
        }
    }

    #[test]
    fn index_is_additive(zeros in proptest::collection::vec(off_circle(), 0..4),
                         poles in proptest::collection::vec(off_circle(), 0..4)) {
        let inside = |v: &Vec<C>| v.iter().filter(|a| a.norm() < 1.0).count() as i64;
        let phi = CircleFunction::from_fn(N, |l| {
            zeros.iter().fold(C::new(1.0, 0.0), |acc, a| acc * (l - a))
                / poles.iter().fold(C::new(1.0, 0.0), |acc, a| acc * (l - a))
        });
        prop_assert_eq!(winding_index(&phi).unwrap(), inside(&zeros) - inside(&poles));
    }

    #[test]
    fn scaffold_adds_three_to_the_index(p in proptest::array::uniform3(-0.02f64..0.02)) {
        let g = PolynomialGluing::new(-2, [C::new(1.0, 0.0), C::new(0.02, 0.0)], 10.0);
        let lambdas = [C::new(0.1, 0.0), C::new(0.2, 0.0), C::new(10.0, 0.0)];
        let s = wave_scaffold(&g, lambdas, p.map(|v| C::new(v, 0.0))).unwrap();
        let zero = C::new(0.0, 0.0);
        let base = winding_index(&CircleFunction::from_fn(N, |l| g.dt(l, zero))).unwrap();
        let scaffolded = winding_index(&CircleFunction::from_fn(N, |l| s.dt(l, zero))).unwrap();
        prop_assert_eq!(scaffolded, base + 3);
    }
}

#[test]
fn monomial_indices() {
    for k in -8..=8 {
        assert_eq!(winding_index(&CircleFunction::monomial(N, k, C::new(1.0, 0.0))).unwrap(), k);
    }
}
