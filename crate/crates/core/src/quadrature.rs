//! Quadrature rules for the resolvent representations.
//!
//! Contour rules approximate `exp(A) ≈ Σ_j w_j (ζ_j I − A)⁻¹`, with the
//! exponential folded into the weights. Stieltjes rules approximate
//! `∫₀^∞ (A + tI)⁻¹ dμ(t) ≈ Σ_i w_i (A + t_i I)⁻¹` for the measure of the
//! paired function.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{FunctionClass, FunctionId, ScalarFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Parabolic,
    Hyperbolic,
    Cotangent,
    StieltjesInvsqrt,
    StieltjesSqrt,
    /// point mass at `t = 0`, the measure of `z⁻¹`
    StieltjesInv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    /// nodes `ζ_j` enter as `(ζ_j I − A)⁻¹`
    Cauchy,
    /// nodes `t_i` enter as `(A + t_i I)⁻¹`; derivative sign `(−1)^k`
    Stieltjes,
    /// as `Stieltjes`, weights carry `t_i`; derivative sign `(−1)^{k+1}`
    ZStieltjes,
}

impl RuleKind {
    pub const ALL: [RuleKind; 6] = [
        RuleKind::Parabolic,
        RuleKind::Hyperbolic,
        RuleKind::Cotangent,
        RuleKind::StieltjesInvsqrt,
        RuleKind::StieltjesSqrt,
        RuleKind::StieltjesInv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Parabolic => "parabolic",
            RuleKind::Hyperbolic => "hyperbolic",
            RuleKind::Cotangent => "cotangent",
            RuleKind::StieltjesInvsqrt => "stieltjes-invsqrt",
            RuleKind::StieltjesSqrt => "stieltjes-sqrt",
            RuleKind::StieltjesInv => "stieltjes-inv",
        }
    }

    pub fn is_contour(self) -> bool {
        matches!(self, RuleKind::Parabolic | RuleKind::Hyperbolic | RuleKind::Cotangent)
    }

    pub fn representation(self) -> Representation {
        match self {
            RuleKind::Parabolic | RuleKind::Hyperbolic | RuleKind::Cotangent => Representation::Cauchy,
            RuleKind::StieltjesInvsqrt | RuleKind::StieltjesInv => Representation::Stieltjes,
            RuleKind::StieltjesSqrt => Representation::ZStieltjes,
        }
    }

    /// The only function each rule's weights are built for.
    pub fn target(self) -> FunctionId {
        match self {
            RuleKind::Parabolic | RuleKind::Hyperbolic | RuleKind::Cotangent => FunctionId::Exp,
            RuleKind::StieltjesInvsqrt => FunctionId::InvSqrt,
            RuleKind::StieltjesSqrt => FunctionId::Sqrt,
            RuleKind::StieltjesInv => FunctionId::Inv,
        }
    }

    pub fn default_for(f: FunctionId) -> RuleKind {
        match f {
            FunctionId::Exp => RuleKind::Parabolic,
            FunctionId::Inv => RuleKind::StieltjesInv,
            FunctionId::InvSqrt => RuleKind::StieltjesInvsqrt,
            FunctionId::Sqrt => RuleKind::StieltjesSqrt,
        }
    }

    pub fn check_compatible(self, f: &ScalarFunction) -> Result<()> {
        let class_ok = match self.representation() {
            Representation::Cauchy => f.class == FunctionClass::CauchyContour,
            Representation::Stieltjes => f.class == FunctionClass::Stieltjes,
            Representation::ZStieltjes => f.class == FunctionClass::ZTimesStieltjes,
        };
        if class_ok && self.target() == f.id {
            Ok(())
        } else {
            Err(Error::IncompatibleRule {
                rule: self.name(),
                function: f.name(),
            })
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown quadrature rule `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub m: usize,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    /// nodes closed under conjugation with conjugate weights
    pub conjugate_symmetric: bool,
    pub representation: Representation,
    #[serde(default)]
    pub constants: WeightConstants,
}

/// Midpoint grid `θ_j = −π + (2j−1)π/m`, `j = 1..m`.
pub fn theta_grid(m: usize) -> Vec<f64> {
    (1..=m).map(|j| -PI + (2 * j - 1) as f64 * PI / m as f64).collect()
}

fn parabolic_node(m: f64, th: f64, _: WeightConstants) -> (Complex64, Complex64) {
    let z = Complex64::new(m * (0.1309 - 0.1194 * th * th), m * 0.25 * th);
    (z, z.exp() * Complex64::new(0.25, 0.2388 * th))
}

fn hyperbolic_node(m: f64, th: f64, constants: WeightConstants) -> (Complex64, Complex64) {
    let s = Complex64::new(1.1721, -0.3443 * th);
    let z = (Complex64::new(1.0, 0.0) - s.sin()) * (2.246 * m);
    let c = match constants {
        WeightConstants::Consistent => 2.246 * 0.3443,
        WeightConstants::Printed => 0.7733,
    };
    (z, z.exp() * s.cos() * c)
}

fn cotangent_node(m: f64, th: f64, constants: WeightConstants) -> (Complex64, Complex64) {
    if th == 0.0 {
        // limit θ → 0 of the removable singularity
        let z = Complex64::new(m * (0.5017 / 0.6407 - 0.6122), 0.0);
        return (z, z.exp() * 0.2645);
    }
    let a = 0.6407 * th;
    let cot = a.cos() / a.sin();
    let csc2 = 1.0 / (a.sin() * a.sin());
    let z = Complex64::new(m * (0.5017 * th * cot - 0.6122), m * 0.2645 * th);
    let c = match constants {
        WeightConstants::Consistent => 0.5017 * 0.6407,
        WeightConstants::Printed => 0.3214,
    };
    let w = Complex64::new(0.2645, -0.5017 * cot + c * th * csc2);
    (z, z.exp() * w)
}

/// How the weight constants of the contour rules are obtained.
///
/// The published four-digit weight constants `0.7733` and `0.3214` are
/// roundings of the products `2.246·0.3443` and `0.5017·0.6407` of the contour
/// constants. The rounding perturbs every weight by a relative `~3e-6`
/// (hyperbolic) or, near `θ = 0`, by far more (cotangent), which caps the
/// attainable accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightConstants {
    /// `w = e^ζ ζ′(θ)/(m i)` exactly, for the contour as printed
    #[default]
    Consistent,
    /// the rounded constants as published
    Printed,
}

pub fn contour_rule(kind: RuleKind, m: usize) -> Result<QuadratureRule> {
    contour_rule_with(kind, m, WeightConstants::Consistent)
}

pub fn contour_rule_with(kind: RuleKind, m: usize, constants: WeightConstants) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::BadParams("quadrature needs m >= 1".into()));
    }
    let node: fn(f64, f64, WeightConstants) -> (Complex64, Complex64) = match kind {
        RuleKind::Parabolic => parabolic_node,
        RuleKind::Hyperbolic => hyperbolic_node,
        RuleKind::Cotangent => cotangent_node,
        _ => return Err(Error::BadParams(format!("`{kind}` is not a contour rule"))),
    };
    let (nodes, weights) = theta_grid(m).into_iter().map(|th| node(m as f64, th, constants)).unzip();
    Ok(QuadratureRule {
        kind,
        m,
        nodes,
        weights,
        conjugate_symmetric: true,
        representation: Representation::Cauchy,
        constants,
    })
}

/// Gauss–Chebyshev nodes `x_i = cos((2i−1)π/(2m))` and weights `π/m` for
/// the weight `(1 − x²)^{-1/2}` on `[−1, 1]`.
pub fn chebyshev_nodes(m: usize) -> (Vec<f64>, Vec<f64>) {
    let x = (1..=m)
        .map(|i| ((2 * i - 1) as f64 * PI / (2 * m) as f64).cos())
        .collect();
    (x, vec![PI / m as f64; m])
}

pub fn stieltjes_rule(kind: RuleKind, m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::BadParams("quadrature needs m >= 1".into()));
    }
    let (nodes, weights): (Vec<_>, Vec<_>) = match kind {
        RuleKind::StieltjesInv => (vec![Complex64::new(0.0, 0.0)], vec![Complex64::new(1.0, 0.0)]),
        RuleKind::StieltjesInvsqrt | RuleKind::StieltjesSqrt => {
            let (x, om) = chebyshev_nodes(m);
            x.iter()
                .zip(&om)
                .map(|(&xi, &wi)| {
                    let t = (1.0 + xi) / (1.0 - xi);
                    let mu = 2.0 / PI * wi / (1.0 - xi);
                    let w = if kind == RuleKind::StieltjesSqrt { mu * t } else { mu };
                    (Complex64::new(t, 0.0), Complex64::new(w, 0.0))
                })
                .unzip()
        }
        _ => return Err(Error::BadParams(format!("`{kind}` is not a Stieltjes rule"))),
    };
    Ok(QuadratureRule {
        kind,
        m: nodes.len(),
        nodes,
        weights,
        conjugate_symmetric: false,
        representation: kind.representation(),
        constants: WeightConstants::Consistent,
    })
}

pub fn build_rule(kind: RuleKind, m: usize) -> Result<QuadratureRule> {
    if kind.is_contour() {
        contour_rule(kind, m)
    } else {
        stieltjes_rule(kind, m)
    }
}

impl QuadratureRule {
    /// Sign applied to the node sum for the k-th derivative.
    pub fn derivative_sign(&self, k: usize) -> f64 {
        let odd = match self.representation {
            Representation::Cauchy => false,
            Representation::Stieltjes => k % 2 == 1,
            Representation::ZStieltjes => k.is_multiple_of(2),
        };
        if odd {
            -1.0
        } else {
            1.0
        }
    }

    /// Shift `s` such that node `j` uses the resolvent of `A` as `(A + s·I)⁻¹`
    /// up to the sign of the factor, i.e. `ζ_j I − A = −(A − ζ_j I)`.
    pub fn resolvent_shift(&self, j: usize) -> Complex64 {
        match self.representation {
            Representation::Cauchy => -self.nodes[j],
            _ => self.nodes[j],
        }
    }

    /// Indices of the nodes to visit when exploiting conjugate symmetry:
    /// the nodes with `Im ζ > 0`, plus a real node if present, with the
    /// multiplier applied to the real part of their contribution.
    pub fn half_nodes(&self) -> Vec<(usize, f64)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(j, z)| {
                if z.im > 0.0 {
                    Some((j, 2.0))
                } else if z.im == 0.0 {
                    Some((j, 1.0))
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Applies the rule to the 1×1 matrix `(z)` and returns the approximation of `f(z)`.
pub fn scalar_check(rule: &QuadratureRule, f: &ScalarFunction, z: Complex64) -> Result<Complex64> {
    rule.kind.check_compatible(f)?;
    let s: Complex64 = match rule.representation {
        Representation::Cauchy => rule.nodes.iter().zip(&rule.weights).map(|(n, w)| w / (n - z)).sum(),
        Representation::Stieltjes => rule.nodes.iter().zip(&rule.weights).map(|(t, w)| w / (z + t)).sum(),
        // the measure itself is infinite; integrate z/(z+t) = 1 − t/(z+t) as z·∫dμ/(z+t)
        Representation::ZStieltjes => {
            let (x, om) = chebyshev_nodes(rule.m);
            x.iter()
                .zip(&om)
                .map(|(&xi, &wi)| {
                    let t = (1.0 + xi) / (1.0 - xi);
                    z * (2.0 / PI * wi / (1.0 - xi)) / (z + t)
                })
                .sum()
        }
    };
    Ok(s)
}

/// Scalar k-th derivative from the same rule, the 1×1 reduction of the engine sum.
pub fn scalar_derivative(rule: &QuadratureRule, k: usize, z: Complex64) -> Complex64 {
    let kfact: f64 = (1..=k).map(|i| i as f64).product();
    let sum: Complex64 = match rule.representation {
        Representation::Cauchy => rule.nodes.iter().zip(&rule.weights).map(|(n, w)| w / (n - z).powu(k as u32 + 1)).sum(),
        _ => rule.nodes.iter().zip(&rule.weights).map(|(t, w)| w / (z + t).powu(k as u32 + 1)).sum(),
    };
    sum * kfact * rule.derivative_sign(k)
}
