use super::permutations::for_each_permutation;
use crate::error::Result;
use crate::linalg::{ComplexMatrix, LuFactors, SolveMode};

/// `Σ_π R E_{π1} R ⋯ E_{πk} R` for `R = M⁻¹` with `P M = L U`.
pub(super) fn node_term(lu: &LuFactors, e: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let n = lu.dim();
    let tilde = e
        .iter()
        .map(|ei| lu.right_solve_upper(&lu.solve(ei, SolveMode::LowerOnly)?))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = ComplexMatrix::zeros(n, n);
    for_each_permutation(e.len(), |p| {
        let mut prod = tilde[p[0]].clone();
        for &i in &p[1..] {
            prod = prod.matmul(&tilde[i]);
        }
        sum += &prod;
    });
    lu.right_solve_lower_perm(&lu.solve(&sum, SolveMode::UpperOnly)?)
}
