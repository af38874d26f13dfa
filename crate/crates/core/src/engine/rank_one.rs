use std::ops::Range;

use num_complex::Complex64;

use super::permutations::for_each_permutation;
use crate::linalg::{dot_conj, ComplexMatrix, ShiftedSolver};

#[derive(Debug, Default)]
pub(super) struct Counters {
    pub solves: u64,
    pub outer_products: u64,
}

/// Entries this far below the largest modulus of a solve are dropped; keeping them
/// only produces subnormal arithmetic in the outer products.
const TRIM: f64 = 1e-150;

/// Zeroes negligible entries and returns the range holding the rest.
fn trim(x: &mut [Complex64]) -> Range<usize> {
    let mx = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let thr = mx * TRIM;
    let mut first = x.len();
    let mut last = 0;
    for (i, z) in x.iter_mut().enumerate() {
        if z.norm() <= thr {
            *z = Complex64::new(0.0, 0.0);
        } else {
            first = first.min(i);
            last = i + 1;
        }
    }
    if first >= last {
        0..0
    } else {
        first..last
    }
}

/// `Σ_π a_{π1} (b_{π1}ᴴ u_{π2}) ⋯ (b_{π(k−1)}ᴴ u_{πk}) b_{πk}ᴴ` with `a_i = R u_i`, `b_i = Rᴴ v_i`.
pub(super) fn node_term(
    solver: &dyn ShiftedSolver,
    pairs: &[(Vec<Complex64>, Vec<Complex64>)],
    counters: &mut Counters,
) -> ComplexMatrix {
    let n = solver.dim();
    let k = pairs.len();
    let mut a = Vec::with_capacity(k);
    let mut b = Vec::with_capacity(k);
    for (u, v) in pairs {
        let mut x = u.clone();
        solver.solve_vec(&mut x);
        a.push(x);
        let mut y = v.clone();
        solver.solve_adjoint_vec(&mut y);
        b.push(y);
    }
    counters.solves += 2 * k as u64;
    let ra: Vec<Range<usize>> = a.iter_mut().map(|x| trim(x)).collect();
    let rb: Vec<Range<usize>> = b.iter_mut().map(|y| trim(y)).collect();
    // c[i][j] = b_iᴴ u_j
    let c: Vec<Vec<Complex64>> = b
        .iter()
        .map(|bi| pairs.iter().map(|(uj, _)| dot_conj(bi, uj)).collect())
        .collect();
    let mut sum = ComplexMatrix::zeros(n, n);
    for_each_permutation(k, |p| {
        let coef: Complex64 = p.windows(2).map(|w| c[w[0]][w[1]]).product();
        let (i, j) = (p[0], p[k - 1]);
        sum.add_outer_within(coef, &a[i], ra[i].clone(), &b[j], rb[j].clone());
        counters.outer_products += 1;
    });
    sum
}
