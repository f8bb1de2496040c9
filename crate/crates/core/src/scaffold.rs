//! Interpolation scaffolds that inject boundary values into a gluing
//! function.
//!
//! Given inner nodes `Λ = {λ_1..λ_k}` inside the unit disk, outer nodes
//! `M = {μ_1..μ_m}` outside it, and values `a_l`, `b_l`, the scaffolded
//! gluing function is
//!
//! ```text
//! 𝒢(λ, t) = F₋(λ)⁻¹ · ( g(λ, t̃) − Σ_l b_l F₋,l(λ) ),   t̃ = t·F₊(λ) + Σ_l a_l F₊,l(λ)
//! ```
//!
//! where `F₊`, `F₊,l` are the Lagrange basis polynomials over `Λ ∪ {0}` at
//! `0` and at `λ_l`, and `F₋ = ∏(1 − μ/λ)`,
//! `F₋,l = ∏_{j≠l} (1 − μ_j/λ)/(1 − μ_j/μ_l)`. Solving the Riemann problem
//! for `𝒢` yields a section with `σ₊(λ_l) = a_l` and `σ₋(μ_l) = b_l`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::annulus::{node, DEFAULT_HALF_ORDER};
use crate::riemann::GluingFunction;
use crate::C;

/// Minimal distance of every node from the unit circle.
pub const NODE_CLEARANCE: f64 = 0.05;
/// Share of the base disk the interpolated offset `Σ a_l F₊,l` may use.
pub const BUDGET_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScaffoldError {
    #[error("interpolation nodes must be pairwise distinct")]
    DuplicateNodes,
    #[error("interpolation nodes must be nonzero and finite")]
    ZeroNode,
    #[error("node {node} at modulus {modulus} violates the circle clearance")]
    NodePlacement { node: C, modulus: f64 },
    #[error("{nodes} nodes but {values} values")]
    ValueCountMismatch { nodes: usize, values: usize },
    #[error("boundary values push the t argument to {modulus:e}, beyond the budget {budget:e}")]
    TArgumentOutOfDisk { modulus: f64, budget: f64 },
}

/// `L_l(λ) = ∏_{j≠l} (λ − x_j)/(x_l − x_j)`.
pub fn lagrange_basis(nodes: &[C], l: usize, lambda: C) -> C {
    let xl = nodes[l];
    nodes
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != l)
        .fold(C::new(1.0, 0.0), |acc, (_, &xj)| acc * (lambda - xj) / (xl - xj))
}

/// Inner and outer interpolation nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    inner: Vec<C>,
    outer: Vec<C>,
}

impl NodeSet {
    pub fn new(inner: Vec<C>, outer: Vec<C>) -> Result<Self, ScaffoldError> {
        Self::with_clearance(inner, outer, NODE_CLEARANCE)
    }

    pub fn with_clearance(inner: Vec<C>, outer: Vec<C>, clearance: f64) -> Result<Self, ScaffoldError> {
        let all: Vec<C> = inner.iter().chain(&outer).copied().collect();
        for (i, a) in all.iter().enumerate() {
            if a.norm() == 0.0 || !a.re.is_finite() || !a.im.is_finite() {
                return Err(ScaffoldError::ZeroNode);
            }
            if all[i + 1..].contains(a) {
                return Err(ScaffoldError::DuplicateNodes);
            }
        }
        for &n in &inner {
            if n.norm() > 1.0 - clearance {
                return Err(ScaffoldError::NodePlacement { node: n, modulus: n.norm() });
            }
        }
        for &n in &outer {
            if n.norm() < 1.0 + clearance {
                return Err(ScaffoldError::NodePlacement { node: n, modulus: n.norm() });
            }
        }
        Ok(Self { inner, outer })
    }

    pub fn inner(&self) -> &[C] {
        &self.inner
    }

    pub fn outer(&self) -> &[C] {
        &self.outer
    }
}

/// The scaffold factors at one `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaffoldFactors {
    pub f_plus: C,
    pub f_plus_l: Vec<C>,
    pub f_minus: C,
    pub f_minus_l: Vec<C>,
}

pub fn scaffold_factors(nodes: &NodeSet, lambda: C) -> ScaffoldFactors {
    let one = C::new(1.0, 0.0);
    let inner = &nodes.inner;
    let outer = &nodes.outer;
    let f_plus = inner.iter().fold(one, |acc, &l| acc * (one - lambda / l));
    let f_plus_l = (0..inner.len())
        .map(|l| lambda / inner[l] * lagrange_basis(inner, l, lambda))
        .collect();
    let f_minus = outer.iter().fold(one, |acc, &m| acc * (one - m / lambda));
    let f_minus_l = (0..outer.len())
        .map(|l| {
            outer
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != l)
                .fold(one, |acc, (_, &m)| acc * (one - m / lambda) / (one - m / outer[l]))
        })
        .collect();
    ScaffoldFactors {
        f_plus,
        f_plus_l,
        f_minus,
        f_minus_l,
    }
}

/// A base gluing function with boundary values injected at the nodes.
pub struct ScaffoldedGluing<'g> {
    base: &'g dyn GluingFunction,
    nodes: NodeSet,
    inner_values: Vec<C>,
    outer_values: Vec<C>,
}

impl core::fmt::Debug for ScaffoldedGluing<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ScaffoldedGluing")
            .field("nodes", &self.nodes)
            .field("inner_values", &self.inner_values)
            .field("outer_values", &self.outer_values)
            .finish_non_exhaustive()
    }
}

impl<'g> ScaffoldedGluing<'g> {
    /// Checks value counts and that `|Σ a_l F₊,l| < 0.9·δ` on the circle
    /// samples the base function is defined on (64 by default).
    pub fn new(
        base: &'g dyn GluingFunction,
        nodes: NodeSet,
        inner_values: Vec<C>,
        outer_values: Vec<C>,
    ) -> Result<Self, ScaffoldError> {
        if inner_values.len() != nodes.inner.len() {
            return Err(ScaffoldError::ValueCountMismatch {
                nodes: nodes.inner.len(),
                values: inner_values.len(),
            });
        }
        if outer_values.len() != nodes.outer.len() {
            return Err(ScaffoldError::ValueCountMismatch {
                nodes: nodes.outer.len(),
                values: outer_values.len(),
            });
        }
        let s = Self {
            base,
            nodes,
            inner_values,
            outer_values,
        };
        let budget = BUDGET_FRACTION * base.delta();
        if budget.is_finite() {
            let samples = base.sample_count().unwrap_or(2 * DEFAULT_HALF_ORDER);
            let modulus = (0..samples)
                .map(|j| s.offset(node(samples / 2, j)).norm())
                .fold(0.0, f64::max);
            if !(modulus < budget) {
                return Err(ScaffoldError::TArgumentOutOfDisk { modulus, budget });
            }
        }
        Ok(s)
    }

    pub fn base(&self) -> &'g dyn GluingFunction {
        self.base
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    /// `Σ a_l F₊,l(λ)`, the value of `t̃` at `t = 0`.
    pub fn offset(&self, lambda: C) -> C {
        let inner = &self.nodes.inner;
        (0..inner.len())
            .map(|l| self.inner_values[l] * lambda / inner[l] * lagrange_basis(inner, l, lambda))
            .sum()
    }

    /// `Σ b_l F₋,l(λ)`.
    pub fn outer_term(&self, lambda: C) -> C {
        let f = scaffold_factors(&self.nodes, lambda);
        f.f_minus_l
            .iter()
            .zip(&self.outer_values)
            .map(|(fl, b)| fl * b)
            .sum()
    }

    /// `(t̃, F₊, F₋, Σ b_l F₋,l)`, the ingredients of one evaluation with the
    /// boundary values scaled by `kappa`.
    pub(crate) fn parts(&self, lambda: C, t: C, kappa: f64) -> (C, C, C, C) {
        let f = scaffold_factors(&self.nodes, lambda);
        let a: C = f.f_plus_l.iter().zip(&self.inner_values).map(|(fl, a)| fl * a).sum();
        let b: C = f.f_minus_l.iter().zip(&self.outer_values).map(|(fl, b)| fl * b).sum();
        (t * f.f_plus + a * kappa, f.f_plus, f.f_minus, b * kappa)
    }

    /// `∂𝒢/∂κ` when every boundary value is scaled by `κ`.
    pub(crate) fn dkappa(&self, lambda: C, t: C, kappa: f64) -> C {
        let f = scaffold_factors(&self.nodes, lambda);
        let a: C = f.f_plus_l.iter().zip(&self.inner_values).map(|(fl, a)| fl * a).sum();
        let b: C = f.f_minus_l.iter().zip(&self.outer_values).map(|(fl, b)| fl * b).sum();
        let tt = t * f.f_plus + a * kappa;
        (self.base.dt(lambda, tt) * a - b) / f.f_minus
    }

    pub(crate) fn eval_scaled(&self, lambda: C, t: C, kappa: f64) -> C {
        let (tt, _, fm, b) = self.parts(lambda, t, kappa);
        (self.base.eval(lambda, tt) - b) / fm
    }

    pub(crate) fn dt_scaled(&self, lambda: C, t: C, kappa: f64) -> C {
        let (tt, fp, fm, _) = self.parts(lambda, t, kappa);
        self.base.dt(lambda, tt) * fp / fm
    }

    pub(crate) fn admits_scaled(&self, lambda: C, t: C, kappa: f64) -> bool {
        let (tt, _, _, _) = self.parts(lambda, t, kappa);
        tt.norm() < self.base.delta() && self.base.admits(lambda, tt)
    }
}

impl GluingFunction for ScaffoldedGluing<'_> {
    fn eval(&self, lambda: C, t: C) -> C {
        self.eval_scaled(lambda, t, 1.0)
    }
    fn dt(&self, lambda: C, t: C) -> C {
        self.dt_scaled(lambda, t, 1.0)
    }
    fn delta(&self) -> f64 {
        f64::INFINITY
    }
    fn epsilon(&self) -> f64 {
        self.base.epsilon()
    }
    fn admits(&self, lambda: C, t: C) -> bool {
        self.admits_scaled(lambda, t, 1.0)
    }
    fn zero_preserving(&self) -> bool {
        self.base.zero_preserving()
            && self.inner_values.iter().chain(&self.outer_values).all(|v| v.norm() == 0.0)
    }
    fn sample_count(&self) -> Option<usize> {
        self.base.sample_count()
    }
}

/// The scaffold that turns a wave gluing function into the Riemann problem
/// for `w(x, y, z)`: inner nodes `{λ1, λ2}` carry `(x, y)`, the outer node
/// `λ3` carries `z`.
pub fn wave_scaffold<'g>(
    g: &'g dyn GluingFunction,
    lambdas: [C; 3],
    point: [C; 3],
) -> Result<ScaffoldedGluing<'g>, ScaffoldError> {
    let nodes = NodeSet::new(alloc::vec![lambdas[0], lambdas[1]], alloc::vec![lambdas[2]])?;
    ScaffoldedGluing::new(g, nodes, alloc::vec![point[0], point[1]], alloc::vec![point[2]])
}
