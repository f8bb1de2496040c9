//! Equation coefficients, spectral parameters and cross-ratios.

#[allow(unused_imports)]
use num_traits::Float;

use super::PdeError;
use crate::C;

/// Relative tolerance on `A + B + C = 0`.
pub const SUM_TOLERANCE: f64 = 1e-14;

/// Coefficients of an (A,B,C)-equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ABCTriple {
    pub a: C,
    pub b: C,
    pub c: C,
}

impl ABCTriple {
    /// Validates `A, B, C ≠ 0` and `A + B + C = 0` to [`SUM_TOLERANCE`]
    /// relative to `|A| + |B| + |C|`.
    pub fn new(a: C, b: C, c: C) -> Result<Self, PdeError> {
        let sum = (a + b + c).norm();
        let scale = a.norm() + b.norm() + c.norm();
        if a.norm() == 0.0 || b.norm() == 0.0 || c.norm() == 0.0 || !(sum <= SUM_TOLERANCE * scale) {
            return Err(PdeError::InvalidTriple { sum });
        }
        Ok(Self { a, b, c })
    }

    pub fn as_array(&self) -> [C; 3] {
        [self.a, self.b, self.c]
    }
}

/// The three spectral parameters attached to the coordinate foliations
/// `x = const`, `y = const`, `z = const`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaTriple {
    pub l1: C,
    pub l2: C,
    pub l3: C,
}

impl LambdaTriple {
    pub fn new(l1: C, l2: C, l3: C) -> Self {
        Self { l1, l2, l3 }
    }

    pub fn abc(&self) -> Result<ABCTriple, PdeError> {
        abc_from_lambda_triple(self.l1, self.l2, self.l3)
    }

    pub fn as_array(&self) -> [C; 3] {
        [self.l1, self.l2, self.l3]
    }

    /// `(λ1:λ2:λ3:λ)`.
    pub fn mu(&self, lambda: C) -> Result<C, PdeError> {
        cross_ratio(
            ProjectivePoint::Finite(self.l1),
            ProjectivePoint::Finite(self.l2),
            ProjectivePoint::Finite(self.l3),
            ProjectivePoint::Finite(lambda),
        )
    }
}

/// `A = λ1(λ2−λ3)`, `B = λ2(λ3−λ1)`, `C = λ3(λ1−λ2)`.
pub fn abc_from_lambda_triple(l1: C, l2: C, l3: C) -> Result<ABCTriple, PdeError> {
    let finite = [l1, l2, l3].iter().all(|l| l.re.is_finite() && l.im.is_finite());
    if !finite || l1 == l2 || l2 == l3 || l1 == l3 || [l1, l2, l3].iter().any(|l| l.norm() == 0.0) {
        return Err(PdeError::DegenerateLambdas);
    }
    ABCTriple::new(l1 * (l2 - l3), l2 * (l3 - l1), l3 * (l1 - l2))
}

/// A point of the projective line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectivePoint {
    Finite(C),
    Infinity,
}

impl ProjectivePoint {
    pub fn finite(&self) -> Option<C> {
        match *self {
            ProjectivePoint::Finite(z) => Some(z),
            ProjectivePoint::Infinity => None,
        }
    }
}

impl From<C> for ProjectivePoint {
    fn from(z: C) -> Self {
        ProjectivePoint::Finite(z)
    }
}

fn distinct(points: &[ProjectivePoint]) -> bool {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return false;
            }
        }
    }
    true
}

/// `(a:b:c:d) = ((d−a)/(d−c))·((b−c)/(b−a))`, with the point at infinity
/// handled by cancelling the two factors that contain it.
pub fn cross_ratio(
    a: ProjectivePoint,
    b: ProjectivePoint,
    c: ProjectivePoint,
    d: ProjectivePoint,
) -> Result<C, PdeError> {
    use ProjectivePoint::*;
    if !distinct(&[a, b, c, d]) {
        return Err(PdeError::CoincidentPoints);
    }
    Ok(match (a, b, c, d) {
        (Infinity, Finite(b), Finite(c), Finite(d)) => (b - c) / (d - c),
        (Finite(a), Infinity, Finite(c), Finite(d)) => (d - a) / (d - c),
        (Finite(a), Finite(b), Infinity, Finite(d)) => (d - a) / (b - a),
        (Finite(a), Finite(b), Finite(c), Infinity) => (b - c) / (b - a),
        (Finite(a), Finite(b), Finite(c), Finite(d)) => ((d - a) / (d - c)) * ((b - c) / (b - a)),
        _ => unreachable!("at most one point can be infinite once distinct"),
    })
}

/// The fourth spectral parameter with `−A/C = (λ1:λ2:λ3:λ4)`.
pub fn lambda4_from_abc(
    l1: ProjectivePoint,
    l2: ProjectivePoint,
    l3: ProjectivePoint,
    abc: &ABCTriple,
) -> Result<ProjectivePoint, PdeError> {
    use ProjectivePoint::*;
    if !distinct(&[l1, l2, l3]) {
        return Err(PdeError::CoincidentPoints);
    }
    let r = -abc.a / abc.c;
    let tiny = 1e-14;
    if r.norm() < tiny || (r - 1.0).norm() < tiny || !r.re.is_finite() || !r.im.is_finite() {
        return Err(PdeError::RatioDegenerate);
    }
    // Solve the defining identity for d in each chart.
    let d = match (l1, l2, l3) {
        (Finite(a), Finite(b), Finite(c)) => {
            let s = r * (b - a) / (b - c);
            if (s - 1.0).norm() < tiny {
                Infinity
            } else {
                Finite((a - s * c) / (1.0 - s))
            }
        }
        (Infinity, Finite(b), Finite(c)) => Finite(c + (b - c) / r),
        (Finite(a), Infinity, Finite(c)) => Finite((a - r * c) / (1.0 - r)),
        (Finite(a), Finite(b), Infinity) => Finite(a + r * (b - a)),
        _ => unreachable!("at most one point can be infinite once distinct"),
    };
    Ok(d)
}

/// Four finite spectral parameters `λ1..λ4` of a Veronese web.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaQuadruple {
    pub l: [C; 4],
}

impl LambdaQuadruple {
    pub fn new(l1: C, l2: C, l3: C, l4: C) -> Result<Self, PdeError> {
        let l = [l1, l2, l3, l4];
        if !distinct(&l.map(ProjectivePoint::Finite)) {
            return Err(PdeError::CoincidentPoints);
        }
        Ok(Self { l })
    }

    /// `μ_k = λ4/λ_k − 1`, `k = 1, 2, 3`.
    pub fn mu(&self) -> Result<[C; 3], PdeError> {
        if self.l[..3].iter().any(|l| l.norm() == 0.0) {
            return Err(PdeError::LambdaContainsZeroOrInfinity);
        }
        Ok([0, 1, 2].map(|k| self.l[3] / self.l[k] - 1.0))
    }

    /// `ν_kl = λ_k/(λ4−λ_k) − λ_l/(λ4−λ_l)` returned as `(ν23, ν31, ν12)`.
    pub fn nu(&self) -> Result<[C; 3], PdeError> {
        if self.l.iter().any(|l| l.norm() == 0.0) {
            return Err(PdeError::LambdaContainsZeroOrInfinity);
        }
        let q = |k: usize| self.l[k] / (self.l[3] - self.l[k]);
        Ok([q(1) - q(2), q(2) - q(0), q(0) - q(1)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{c, close};
    use proptest::prelude::*;
    use ProjectivePoint::{Finite, Infinity};

    #[test]
    fn abc_of_standard_triple() {
        let t = abc_from_lambda_triple(c(0.1, 0.0), c(0.2, 0.0), c(10.0, 0.0)).unwrap();
        assert!(close(t.a, c(-0.98, 0.0), 1e-14));
        assert!(close(t.b, c(1.98, 0.0), 1e-14));
        assert!(close(t.c, c(-1.0, 0.0), 1e-14));
    }

    #[test]
    fn abc_scales_quadratically() {
        let (l1, l2, l3) = (c(0.3, 0.1), c(-0.2, 0.4), c(2.0, -1.0));
        let s = c(1.7, -0.3);
        let t = abc_from_lambda_triple(l1, l2, l3).unwrap();
        let u = abc_from_lambda_triple(s * l1, s * l2, s * l3).unwrap();
        for (x, y) in t.as_array().iter().zip(u.as_array()) {
            assert!(close(y, x * s * s, 1e-13));
        }
    }

    #[test]
    fn abc_rejects_degenerate_lambdas() {
        assert_eq!(
            abc_from_lambda_triple(c(0.1, 0.0), c(0.1, 0.0), c(2.0, 0.0)),
            Err(PdeError::DegenerateLambdas)
        );
        assert_eq!(
            abc_from_lambda_triple(c(0.0, 0.0), c(0.1, 0.0), c(2.0, 0.0)),
            Err(PdeError::DegenerateLambdas)
        );
    }

    #[test]
    fn cross_ratio_with_infinity() {
        let l = c(0.3, -2.0);
        let r = cross_ratio(Finite(c(0.0, 0.0)), Finite(c(1.0, 0.0)), Infinity, Finite(l)).unwrap();
        assert!(close(r, l, 1e-15));
    }

    #[test]
    fn cross_ratio_rejects_coincident_points() {
        let (a, b, cc) = (Finite(c(0.0, 0.0)), Finite(c(1.0, 0.0)), Finite(c(2.0, 0.0)));
        assert_eq!(cross_ratio(a, b, cc, b), Err(PdeError::CoincidentPoints));
    }

    #[test]
    fn lambda4_is_zero_for_wave_scaffold_parameters() {
        let (l1, l2, l3) = (c(0.1, 0.0), c(0.2, 0.0), c(10.0, 0.0));
        let abc = abc_from_lambda_triple(l1, l2, l3).unwrap();
        let l4 = lambda4_from_abc(Finite(l1), Finite(l2), Finite(l3), &abc).unwrap();
        assert!(close(l4.finite().unwrap(), c(0.0, 0.0), 1e-14));
        let r = cross_ratio(Finite(l1), Finite(l2), Finite(l3), Finite(c(0.0, 0.0))).unwrap();
        assert!(close(r, -abc.a / abc.c, 1e-14));
    }

    #[test]
    fn mu_has_pole_at_third_parameter() {
        let lt = LambdaTriple::new(c(0.1, 0.0), c(0.2, 0.0), c(10.0, 0.0));
        assert_eq!(lt.mu(lt.l3), Err(PdeError::CoincidentPoints));
        assert!(close(lt.mu(c(0.5, 0.0)).unwrap(), c((0.4 / -9.5) * (-9.8 / 0.1), 0.0), 1e-14));
    }

    #[test]
    fn lambda4_rejects_degenerate_ratio() {
        let abc = ABCTriple { a: c(1.0, 0.0), b: c(-2.0, 0.0), c: c(-1.0, 0.0) };
        // -A/C = 1
        let r = lambda4_from_abc(Finite(c(0.1, 0.0)), Finite(c(0.2, 0.0)), Finite(c(3.0, 0.0)), &abc);
        assert_eq!(r, Err(PdeError::RatioDegenerate));
    }

    fn cpx() -> impl Strategy<Value = C> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| C::new(a, b))
    }

    proptest! {
        #[test]
        fn cross_ratio_is_mobius_invariant(
            a in cpx(), b in cpx(), cc in cpx(), d in cpx(),
            p in cpx(), q in cpx(), r in cpx(), s in cpx(),
        ) {
            let det = p * s - q * r;
            prop_assume!(det.norm() > 0.1);
            let pts = [a, b, cc, d];
            for i in 0..4 { for j in i + 1..4 { prop_assume!((pts[i] - pts[j]).norm() > 0.1); } }
            let m = |z: C| (p * z + q) / (r * z + s);
            let images = pts.map(|z| r * z + s);
            prop_assume!(images.iter().all(|w| w.norm() > 0.1));
            let before = cross_ratio(Finite(a), Finite(b), Finite(cc), Finite(d)).unwrap();
            let after = cross_ratio(Finite(m(a)), Finite(m(b)), Finite(m(cc)), Finite(m(d))).unwrap();
            prop_assert!((before - after).norm() <= 1e-12 * (1.0 + before.norm()) * 1e3);
        }

        #[test]
        fn lambda4_round_trip(l1 in cpx(), l2 in cpx(), l3 in cpx(), t in cpx()) {
            prop_assume!((l1 - l2).norm() > 0.1 && (l2 - l3).norm() > 0.1 && (l1 - l3).norm() > 0.1);
            prop_assume!(t.norm() > 0.1 && (t + 1.0).norm() > 0.1);
            // A + B + C = 0 with -A/C = r, r ∉ {0, 1}
            let abc = ABCTriple::new(t, -t - 1.0, c(1.0, 0.0));
            prop_assume!(abc.is_ok());
            let abc = abc.unwrap();
            let l4 = lambda4_from_abc(Finite(l1), Finite(l2), Finite(l3), &abc).unwrap();
            prop_assume!(l4 != Infinity);
            let l4 = l4.finite().unwrap();
            prop_assume!([l1, l2, l3].iter().all(|l| (l - l4).norm() > 1e-3));
            let r = cross_ratio(Finite(l1), Finite(l2), Finite(l3), Finite(l4)).unwrap();
            prop_assert!((r + abc.a / abc.c).norm() <= 1e-12 * (1.0 + r.norm()) * 1e2);
        }

        #[test]
        fn nu_identities(l1 in cpx(), l2 in cpx(), l3 in cpx(), l4 in cpx()) {
            let ls = [l1, l2, l3, l4];
            for i in 0..4 {
                prop_assume!(ls[i].norm() > 0.1);
                for j in i + 1..4 { prop_assume!((ls[i] - ls[j]).norm() > 0.1); }
            }
            let quad = LambdaQuadruple::new(l1, l2, l3, l4).unwrap();
            let [n23, n31, n12] = quad.nu().unwrap();
            let scale = n23.norm() + n31.norm() + n12.norm();
            prop_assert!((n23 + n31 + n12).norm() <= 1e-12 * scale);
            let r = cross_ratio(Finite(l1), Finite(l2), Finite(l3), Finite(l4)).unwrap();
            prop_assert!((-n23 / n12 - r).norm() <= 1e-9 * (1.0 + r.norm()));
        }
    }
}
