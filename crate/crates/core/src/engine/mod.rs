//! Higher-order Fréchet derivatives by quadrature over resolvent products.
//!
//! For a rule with nodes `s_j` and weights `w_j`, each node contributes
//! `w_j Σ_π R E_{π1} R E_{π2} ⋯ E_{πk} R` with `R = (ζ_j I − A)⁻¹` for contour
//! rules and `R = (A + t_j I)⁻¹` for Stieltjes rules. The Stieltjes sum
//! carries the sign of [`QuadratureRule::derivative_sign`].

mod action;
mod dense;
mod directions;
mod permutations;
mod rank_one;

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use action::quadrature_action;
pub use directions::DirectionSet;
pub use permutations::{
    check_order, factorial, for_each_permutation, permutations, permutations_with_max, Permutations,
    DEFAULT_MAX_ORDER,
};

use crate::error::{Error, Result};
use crate::functions::ScalarFunction;
use crate::linalg::{lu_factor, prefer_banded, BandedLu, ComplexMatrix, LuFactors, ShiftedSolver};
use crate::quadrature::{build_rule, contour_rule_with, QuadratureRule, Representation, RuleKind, WeightConstants};

pub const DEFAULT_CONTOUR_NODES: usize = 40;
pub const DEFAULT_STIELTJES_NODES: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Path {
    Dense,
    RankOne,
}

impl Path {
    pub fn name(self) -> &'static str {
        match self {
            Path::Dense => "dense",
            Path::RankOne => "rank-one",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FrechetOptions {
    /// defaults to [`RuleKind::default_for`] the function
    pub rule: Option<RuleKind>,
    /// defaults to 40 nodes for contour rules and 48 for Stieltjes rules
    pub m: Option<usize>,
    /// defaults to the payload type of the directions
    pub path: Option<Path>,
    /// evaluate half of a conjugate-symmetric rule for real data
    pub half_contour: bool,
    pub max_order: usize,
    pub constants: WeightConstants,
    /// banded vector solves on the rank-one path; `None` decides from the bandwidth
    pub banded: Option<bool>,
}

impl Default for FrechetOptions {
    fn default() -> Self {
        Self {
            rule: None,
            m: None,
            path: None,
            half_contour: true,
            max_order: DEFAULT_MAX_ORDER,
            constants: WeightConstants::Consistent,
            banded: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub rule: RuleKind,
    pub m: usize,
    pub k: usize,
    pub path: Path,
    /// nodes actually factored (half of them under conjugate symmetry)
    pub nodes_evaluated: usize,
    pub half_contour: bool,
    pub banded: bool,
    /// permutation products summed over all evaluated nodes
    pub permutations: u64,
    pub factorizations: u64,
    /// vector solves on the rank-one path
    pub solves: u64,
    /// rank-one updates on the rank-one path
    pub outer_products: u64,
    /// `nodes·(2k·solve(n) + n²k!)` in complex multiply-adds, rank-one path only
    pub model_cost: u64,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrechetResult {
    pub value: ComplexMatrix,
    pub diagnostics: Diagnostics,
}

fn check_square_finite(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    if !a.is_finite() {
        return Err(Error::BadParams("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Node visits `(index, multiplier)`; with `half`, only `Re` of each visited term is kept.
pub(crate) struct NodePlan {
    pub(crate) visits: Vec<(usize, f64)>,
    pub(crate) half: bool,
    /// `−A` for contour rules, `A` for Stieltjes rules, so each node factors `base + s_j I`
    pub(crate) base: ComplexMatrix,
}

impl NodePlan {
    /// `real_data` states that the directions (or right-hand sides) are real.
    pub(crate) fn new(rule: &QuadratureRule, a: &ComplexMatrix, real_data: bool, half_contour: bool) -> Self {
        let half = half_contour && rule.conjugate_symmetric && a.is_real() && real_data;
        let visits = if half {
            rule.half_nodes()
        } else {
            (0..rule.nodes.len()).map(|j| (j, 1.0)).collect()
        };
        let base = match rule.representation {
            Representation::Cauchy => -a,
            _ => a.clone(),
        };
        Self { visits, half, base }
    }

    /// `acc += mult · w · term`, or its real part under conjugate symmetry.
    fn accumulate(&self, acc: &mut ComplexMatrix, w: Complex64, mult: f64, term: &ComplexMatrix) {
        if self.half {
            for (x, t) in acc.as_mut_slice().iter_mut().zip(term.as_slice()) {
                *x += Complex64::new(mult * (w * t).re, 0.0);
            }
        } else {
            acc.axpy(w * mult, term);
        }
    }
}

fn singular_resolvent(err: Error, node: usize, shift: Complex64) -> Error {
    match err {
        Error::SingularMatrix { .. } => Error::SingularResolvent {
            node,
            shift: format!("{shift}"),
        },
        other => other,
    }
}

pub(crate) fn factor_node(plan: &NodePlan, j: usize, shift: Complex64) -> Result<LuFactors> {
    lu_factor(&plan.base.shifted(shift)).map_err(|e| singular_resolvent(e, j, shift))
}

fn prepare(
    f: &ScalarFunction,
    rule: &QuadratureRule,
    a: &ComplexMatrix,
    dirs: &DirectionSet,
    max_order: usize,
) -> Result<()> {
    rule.kind.check_compatible(f)?;
    check_square_finite(a)?;
    check_order(dirs.k(), max_order)?;
    dirs.validate(a.nrows())
}

/// Dense path: per node one LU factorization, the auxiliary matrices
/// `Ẽ_i = L⁻¹P E_i U⁻¹`, and the wrap `U⁻¹ (Σ_π Ẽ_{π1}⋯Ẽ_{πk}) L⁻¹P`.
pub fn frechet_quadrature_dense(
    f: &ScalarFunction,
    rule: &QuadratureRule,
    a: &ComplexMatrix,
    dirs: &DirectionSet,
    opts: &FrechetOptions,
) -> Result<FrechetResult> {
    let start = Instant::now();
    prepare(f, rule, a, dirs, opts.max_order)?;
    let k = dirs.k();
    let n = a.nrows();
    let e = dirs.to_dense();
    let plan = NodePlan::new(rule, a, dirs.is_real(), opts.half_contour);
    let mut acc = ComplexMatrix::zeros(n, n);
    for &(j, mult) in &plan.visits {
        let lu = factor_node(&plan, j, rule.nodes[j])?;
        let term = dense::node_term(&lu, &e)?;
        plan.accumulate(&mut acc, rule.weights[j], mult, &term);
    }
    let sign = rule.derivative_sign(k);
    let nodes = plan.visits.len();
    Ok(FrechetResult {
        value: acc.scale_real(sign),
        diagnostics: Diagnostics {
            rule: rule.kind,
            m: rule.m,
            k,
            path: Path::Dense,
            nodes_evaluated: nodes,
            half_contour: plan.half,
            banded: false,
            permutations: nodes as u64 * factorial(k),
            factorizations: nodes as u64,
            solves: 0,
            outer_products: 0,
            model_cost: 0,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// Rank-one path: per node `2k` vector solves give `a_i = R u_i`, `b_i = Rᴴ v_i`; each
/// permutation then costs `k − 1` scalar products and one outer product.
pub fn frechet_quadrature_rankone(
    f: &ScalarFunction,
    rule: &QuadratureRule,
    a: &ComplexMatrix,
    dirs: &DirectionSet,
    opts: &FrechetOptions,
) -> Result<FrechetResult> {
    let start = Instant::now();
    prepare(f, rule, a, dirs, opts.max_order)?;
    let pairs = match dirs {
        DirectionSet::RankOne(p) => p,
        DirectionSet::Dense(_) => {
            return Err(Error::BadParams("the rank-one path needs rank-one directions".into()));
        }
    };
    let k = dirs.k();
    let n = a.nrows();
    let bw = a.bandwidths();
    let banded = opts.banded.unwrap_or_else(|| prefer_banded(n, bw));
    let plan = NodePlan::new(rule, a, dirs.is_real(), opts.half_contour);
    let mut acc = ComplexMatrix::zeros(n, n);
    let mut counters = rank_one::Counters::default();
    let mut model_cost = 0u64;
    for &(j, mult) in &plan.visits {
        let shift = rule.nodes[j];
        let solver: Box<dyn ShiftedSolver> = if banded {
            Box::new(BandedLu::factor_shifted(&plan.base, shift, bw, None).map_err(|e| singular_resolvent(e, j, shift))?)
        } else {
            Box::new(factor_node(&plan, j, shift)?)
        };
        model_cost += 2 * k as u64 * solver.solve_cost() + (n * n) as u64 * factorial(k);
        let term = rank_one::node_term(solver.as_ref(), pairs, &mut counters);
        plan.accumulate(&mut acc, rule.weights[j], mult, &term);
    }
    let sign = rule.derivative_sign(k);
    let nodes = plan.visits.len();
    Ok(FrechetResult {
        value: acc.scale_real(sign),
        diagnostics: Diagnostics {
            rule: rule.kind,
            m: rule.m,
            k,
            path: Path::RankOne,
            nodes_evaluated: nodes,
            half_contour: plan.half,
            banded,
            permutations: nodes as u64 * factorial(k),
            factorizations: nodes as u64,
            solves: counters.solves,
            outer_products: counters.outer_products,
            model_cost,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// Builds the rule selected by `opts` for `f`.
pub fn select_rule(f: &ScalarFunction, opts: &FrechetOptions) -> Result<QuadratureRule> {
    let kind = opts.rule.unwrap_or_else(|| RuleKind::default_for(f.id));
    kind.check_compatible(f)?;
    let m = opts.m.unwrap_or(if kind.is_contour() {
        DEFAULT_CONTOUR_NODES
    } else {
        DEFAULT_STIELTJES_NODES
    });
    if kind.is_contour() {
        contour_rule_with(kind, m, opts.constants)
    } else {
        build_rule(kind, m)
    }
}

/// Quadrature approximation of `L_f^{(k)}(A, E_1, …, E_k)` with default
/// rule and path selection.
pub fn frechet(f: &ScalarFunction, a: &ComplexMatrix, dirs: &DirectionSet, opts: &FrechetOptions) -> Result<FrechetResult> {
    let rule = select_rule(f, opts)?;
    let path = opts.path.unwrap_or(if dirs.is_rank_one() { Path::RankOne } else { Path::Dense });
    match path {
        Path::Dense => frechet_quadrature_dense(f, &rule, a, dirs, opts),
        Path::RankOne => frechet_quadrature_rankone(f, &rule, a, dirs, opts),
    }
}
