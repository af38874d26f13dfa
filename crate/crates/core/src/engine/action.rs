use num_complex::Complex64;

use super::{factor_node, NodePlan};
use crate::error::{Error, Result};
use crate::functions::ScalarFunction;
use crate::linalg::ComplexMatrix;
use crate::quadrature::{QuadratureRule, Representation};

/// `f(A) b` from the same nodes and weights as the derivative sum.
///
/// The z·Stieltjes case evaluates `A Σ_j μ_j (A + t_j I)⁻¹ b` with `μ_j = w_j / t_j`.
pub fn quadrature_action(
    f: &ScalarFunction,
    rule: &QuadratureRule,
    a: &ComplexMatrix,
    b: &[Complex64],
    half_contour: bool,
) -> Result<Vec<Complex64>> {
    rule.kind.check_compatible(f)?;
    let n = a.nrows();
    if !a.is_square() || b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("square matrix and vector of length {}", a.nrows()),
            actual: format!("{}x{} and {}", a.nrows(), a.ncols(), b.len()),
        });
    }
    let real_b = b.iter().all(|z| z.im == 0.0);
    let plan = NodePlan::new(rule, a, real_b, half_contour);
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    for &(j, mult) in &plan.visits {
        let lu = factor_node(&plan, j, rule.nodes[j])?;
        let mut x = b.to_vec();
        lu.solve_in_place(&mut x);
        let w = match rule.representation {
            Representation::ZStieltjes => rule.weights[j] / rule.nodes[j],
            _ => rule.weights[j],
        } * mult;
        for (s, xi) in acc.iter_mut().zip(&x) {
            let t = w * xi;
            *s += if plan.half { Complex64::new(t.re, 0.0) } else { t };
        }
    }
    if rule.representation == Representation::ZStieltjes {
        acc = a.matvec(&acc);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{catalog_lookup, FunctionId};
    use crate::gallery::{lesp, random_hpd};
    use crate::linalg::vec_norm;
    use crate::matfun::matfun;
    use crate::quadrature::{build_rule, RuleKind};

    fn rel(x: &[Complex64], y: &[Complex64]) -> f64 {
        let d: Vec<Complex64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        vec_norm(&d) / vec_norm(y)
    }

    #[test]
    fn matches_dense_matrix_function() {
        let b: Vec<Complex64> = (0..6).map(|i| Complex64::new(1.0 + i as f64, 0.0)).collect();
        let cases = [
            (FunctionId::Exp, RuleKind::Parabolic, lesp(6), 40),
            (FunctionId::InvSqrt, RuleKind::StieltjesInvsqrt, random_hpd(6, 2, 1.0, 4.0), 48),
            (FunctionId::Sqrt, RuleKind::StieltjesSqrt, random_hpd(6, 3, 1.0, 4.0), 64),
            (FunctionId::Inv, RuleKind::StieltjesInv, random_hpd(6, 4, 1.0, 4.0), 1),
        ];
        for (id, kind, a, m) in cases {
            let f = catalog_lookup(id);
            let rule = build_rule(kind, m).unwrap();
            let got = quadrature_action(&f, &rule, &a, &b, true).unwrap();
            let expect = matfun(&f, &a).unwrap().matvec(&b);
            assert!(rel(&got, &expect) < 1e-10, "{id}: {}", rel(&got, &expect));
        }
    }

    #[test]
    fn half_and_full_contour_agree() {
        let f = catalog_lookup(FunctionId::Exp);
        let rule = build_rule(RuleKind::Hyperbolic, 32).unwrap();
        let b = vec![Complex64::new(1.0, 0.0); 5];
        let x = quadrature_action(&f, &rule, &lesp(5), &b, true).unwrap();
        let y = quadrature_action(&f, &rule, &lesp(5), &b, false).unwrap();
        assert!(rel(&x, &y) < 1e-12, "{}", rel(&x, &y));
    }
}
