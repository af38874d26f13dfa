//! Level-1 and level-2 absolute condition numbers.
//!
//! The level-2 bound is the spectral norm of the Kronecker matrix `K` of the
//! bilinear map `(E₁, E₂) ↦ L^{(2)}(A, E₁, E₂)`, assembled on canonical unit
//! directions. Vectorization is column-major throughout: `vec(X)[p + n q] = X[p, q]`.
//! Column `α + n β` of `K` belongs to `E₂ = e_α e_βᵀ`; row `vec(L) + n² (γ + n δ)`
//! belongs to entry `vec(L)` of `L^{(2)}(A, e_γ e_δᵀ, E₂)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{factor_node, select_rule, FrechetOptions, NodePlan};
use crate::error::{Error, Result};
use crate::functions::{FunctionClass, ScalarFunction};
use crate::linalg::{
    check_hermitian, dominant_hermitian, extreme_eigenvalues_hermitian, hermitian_eigenvalues, two_smallest_hpd, ComplexMatrix,
    PowerOptions, JACOBI_MAX_DIM,
};

/// Largest `n` accepted by the Kronecker assembly; storage grows as `n⁶`.
pub const DEFAULT_KRONECKER_CAP: usize = 12;

/// Relative gap `(λ₂ − λ₁)/λ_max` below which `λ_min` counts as multiple.
pub const SIMPLE_GAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cond2Method {
    ExactHpd,
    KroneckerBound,
}

impl Cond2Method {
    pub fn name(self) -> &'static str {
        match self {
            Cond2Method::ExactHpd => "exact-hpd",
            Cond2Method::KroneckerBound => "kronecker-bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cond2Report {
    pub method: Cond2Method,
    pub value: f64,
    pub lambda_min: Option<f64>,
    /// `(n⁴, n²)` for the Kronecker bound
    pub kronecker_dims: Option<(usize, usize)>,
    /// bound over exact, when both are available
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct KroneckerOptions {
    pub frechet: FrechetOptions,
    pub cap: usize,
    /// index columns by `E₁` and rows by `E₂` instead
    pub swap_roles: bool,
}

impl Default for KroneckerOptions {
    fn default() -> Self {
        Self {
            frechet: FrechetOptions::default(),
            cap: DEFAULT_KRONECKER_CAP,
            swap_roles: false,
        }
    }
}

fn is_stieltjes_class(f: &ScalarFunction) -> bool {
    matches!(f.class, FunctionClass::Stieltjes | FunctionClass::ZTimesStieltjes)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `max_i |f′(λ_i)|` for Hermitian `A`; `|f′|` is monotonic on the spectral
/// interval for every catalog function, so only the extreme eigenvalues matter.
pub fn cond_abs_level1(f: &ScalarFunction, a: &ComplexMatrix) -> Result<f64> {
    check_hermitian(a)?;
    let (lo, hi) = extreme_eigenvalues_hermitian(a)?;
    if is_stieltjes_class(f) && lo <= 0.0 {
        return Err(Error::DomainViolation {
            function: f.name(),
            detail: format!("smallest eigenvalue {lo:e} is not positive"),
        });
    }
    Ok((f.df)(real(lo)).norm().max((f.df)(real(hi)).norm()))
}

fn eigen_opts() -> PowerOptions {
    PowerOptions {
        tol: 1e-14,
        max_iter: 20_000,
        ..PowerOptions::default()
    }
}

/// `|f″(λ_min)|` for HPD `A` with simple smallest eigenvalue.
pub fn cond2_exact_hpd(f: &ScalarFunction, a: &ComplexMatrix) -> Result<Cond2Report> {
    if !is_stieltjes_class(f) {
        return Err(Error::UnsupportedClass {
            function: f.name(),
            operation: "the exact level-2 condition number",
        });
    }
    check_hermitian(a)?;
    let n = a.nrows();
    let (lo, hi) = extreme_eigenvalues_hermitian(a).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::NotHpd { lambda_min: 0.0 },
        other => other,
    })?;
    if lo <= 0.0 {
        return Err(Error::NotHpd { lambda_min: lo });
    }
    let lambda_min = if n == 1 {
        lo
    } else {
        let (l1, l2) = if n <= JACOBI_MAX_DIM {
            let ev = hermitian_eigenvalues(a)?;
            (ev[0], ev[1])
        } else {
            two_smallest_hpd(a, eigen_opts())?
        };
        let gap = (l2 - l1) / hi.max(l2);
        if gap <= SIMPLE_GAP_TOL {
            return Err(Error::MultipleMinEigenvalue {
                gap,
                lower_bound: (f.d2f)(real(l1)).norm(),
            });
        }
        l1
    };
    Ok(Cond2Report {
        method: Cond2Method::ExactHpd,
        value: (f.d2f)(real(lambda_min)).norm(),
        lambda_min: Some(lambda_min),
        kronecker_dims: None,
        ratio: None,
    })
}

/// The `n⁴ × n²` Kronecker matrix of `L^{(2)}(A, ·, ·)` in the layout of the module docs.
///
/// Per quadrature node the full resolvent `R` is formed once; the entry for
/// `E₁ = e_γ e_δᵀ`, `E₂ = e_α e_βᵀ` at `(p, q)` is
/// `R[p,γ] R[δ,α] R[β,q] + R[p,α] R[β,γ] R[δ,q]`.
pub fn kronecker_second_frechet(f: &ScalarFunction, a: &ComplexMatrix, opts: &KroneckerOptions) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    let n = a.nrows();
    if n > opts.cap {
        return Err(Error::SizeCapExceeded { size: n, cap: opts.cap });
    }
    let rule = select_rule(f, &opts.frechet)?;
    let plan = NodePlan::new(&rule, a, true, opts.frechet.half_contour);
    let n2 = n * n;
    let mut k = ComplexMatrix::zeros(n2 * n2, n2);
    let sign = rule.derivative_sign(2);
    for &(j, mult) in &plan.visits {
        let r = factor_node(&plan, j, rule.nodes[j])?.inverse();
        let w = rule.weights[j] * (sign * mult);
        let rows: Vec<Vec<Complex64>> = (0..n).map(|i| r.row(i)).collect();
        for beta in 0..n {
            for alpha in 0..n {
                let col = k.col_mut(alpha + n * beta);
                for delta in 0..n {
                    for gamma in 0..n {
                        // E₁ = e_γ e_δᵀ, E₂ = e_α e_βᵀ, roles exchanged on request
                        let (g, d, al, be) = if opts.swap_roles {
                            (alpha, beta, gamma, delta)
                        } else {
                            (gamma, delta, alpha, beta)
                        };
                        let s1 = w * r[(d, al)];
                        let s2 = w * r[(be, g)];
                        let block = &mut col[n2 * (gamma + n * delta)..n2 * (gamma + n * delta + 1)];
                        for q in 0..n {
                            let (rb, rd) = (rows[be][q], rows[d][q]);
                            for p in 0..n {
                                let t = s1 * r[(p, g)] * rb + s2 * r[(p, al)] * rd;
                                let x = &mut block[p + n * q];
                                if plan.half {
                                    *x += real(t.re);
                                } else {
                                    *x += t;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(k)
}

/// Largest singular value through the largest eigenvalue of the Gram matrix `KᴴK`.
pub fn kronecker_norm(k: &ComplexMatrix) -> Result<f64> {
    let g = k.adjoint().matmul(k);
    if g.max_abs() == 0.0 {
        return Ok(0.0);
    }
    if g.nrows() <= JACOBI_MAX_DIM {
        let ev = hermitian_eigenvalues(&g)?;
        return Ok(ev[ev.len() - 1].max(0.0).sqrt());
    }
    let (lambda, _) = dominant_hermitian(g.nrows(), |x| g.matvec(x), eigen_opts())?;
    Ok(lambda.max(0.0).sqrt())
}

/// `‖K‖₂`, together with the exact value and the ratio when `A` is HPD with
/// simple `λ_min` and `f` is of Stieltjes type.
pub fn cond2_upper_bound(f: &ScalarFunction, a: &ComplexMatrix, opts: &KroneckerOptions) -> Result<Cond2Report> {
    let n = a.nrows();
    let k = kronecker_second_frechet(f, a, opts)?;
    let value = kronecker_norm(&k)?;
    let exact = if is_stieltjes_class(f) { cond2_exact_hpd(f, a).ok() } else { None };
    Ok(Cond2Report {
        method: Cond2Method::KroneckerBound,
        value,
        lambda_min: exact.as_ref().and_then(|e| e.lambda_min),
        kronecker_dims: Some((n * n * n * n, n * n)),
        ratio: exact.map(|e| value / e.value),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::engine::{frechet, DirectionSet};
    use crate::functions::{catalog_lookup, FunctionId};
    use crate::gallery::{random_directions, random_hpd, random_similarity, DirectionKind};
    use crate::linalg::{rel_error, spectral_norm_with};
    use crate::matfun::inv;

    fn diag(d: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(d)
    }

    #[test]
    fn level1_examples() {
        let inv_f = catalog_lookup(FunctionId::Inv);
        assert!((cond_abs_level1(&inv_f, &diag(&[1.0, 2.0, 3.0])).unwrap() - 1.0).abs() < 1e-9);
        let e = catalog_lookup(FunctionId::Exp);
        assert!((cond_abs_level1(&e, &diag(&[-2.0, -1.0])).unwrap() - (-1f64).exp()).abs() < 1e-9);
        let is = catalog_lookup(FunctionId::InvSqrt);
        assert!((cond_abs_level1(&is, &diag(&[4.0, 9.0])).unwrap() - 1.0 / 16.0).abs() < 1e-10);
        assert!(matches!(
            cond_abs_level1(&is, &diag(&[-1.0, 2.0])),
            Err(Error::DomainViolation { .. })
        ));
        let ns = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(cond_abs_level1(&e, &ns), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn exact_examples() {
        let cases = [
            (FunctionId::Inv, vec![1.0, 2.0, 3.0], 2.0),
            (FunctionId::InvSqrt, vec![4.0, 9.0], 0.75 * 4f64.powf(-2.5)),
            (FunctionId::Sqrt, vec![1.0, 16.0], 0.25),
        ];
        for (id, d, expect) in cases {
            let r = cond2_exact_hpd(&catalog_lookup(id), &diag(&d)).unwrap();
            assert!((r.value - expect).abs() <= 1e-10 * expect, "{id}: {}", r.value);
            assert_eq!(r.method, Cond2Method::ExactHpd);
        }
        assert!((0.75 * 4f64.powf(-2.5) - 0.0234375).abs() < 1e-15);
    }

    #[test]
    fn exact_error_cases() {
        let e = catalog_lookup(FunctionId::Exp);
        assert!(matches!(
            cond2_exact_hpd(&e, &diag(&[1.0, 2.0])),
            Err(Error::UnsupportedClass { .. })
        ));
        let f = catalog_lookup(FunctionId::Inv);
        assert!(matches!(cond2_exact_hpd(&f, &diag(&[-1.0, 2.0])), Err(Error::NotHpd { .. })));
        let r = cond2_exact_hpd(&f, &random_similarity(&diag(&[1.0, 1.0, 3.0]), 4));
        assert!(matches!(r, Err(Error::MultipleMinEigenvalue { .. })), "{r:?}");
    }

    #[test]
    fn scalar_kronecker_matrix() {
        let f = catalog_lookup(FunctionId::Inv);
        let k = kronecker_second_frechet(&f, &diag(&[1.0]), &KroneckerOptions::default()).unwrap();
        assert_eq!((k.nrows(), k.ncols()), (1, 1));
        assert!((k[(0, 0)].re - 2.0).abs() < 1e-12);
        for id in [FunctionId::Inv, FunctionId::InvSqrt, FunctionId::Sqrt] {
            let f = catalog_lookup(id);
            let r = cond2_upper_bound(&f, &diag(&[2.5]), &KroneckerOptions::default()).unwrap();
            assert!((r.ratio.unwrap() - 1.0).abs() < 1e-10, "{id}");
        }
    }

    #[test]
    fn columns_match_engine() {
        let f = catalog_lookup(FunctionId::InvSqrt);
        let a = random_hpd(3, 7, 1.0, 4.0);
        let opts = KroneckerOptions::default();
        let k = kronecker_second_frechet(&f, &a, &opts).unwrap();
        let n = 3;
        for (g, d, al, be) in [(0, 1, 2, 0), (1, 1, 1, 1), (2, 0, 0, 2)] {
            let dirs = DirectionSet::unit_pairs(n, &[(g, d), (al, be)]).unwrap();
            let l = frechet(&f, &a, &dirs, &opts.frechet).unwrap().value;
            let col = k.col(al + n * be);
            let off = n * n * (g + n * d);
            let block = ComplexMatrix::from_col_major(n, n, col[off..off + n * n].to_vec()).unwrap();
            assert!(rel_error(&block, &l) < 1e-12);
        }
    }

    #[test]
    fn diag_inverse_bound_dominates_exact() {
        let f = catalog_lookup(FunctionId::Inv);
        let r = cond2_upper_bound(&f, &diag(&[1.0, 2.0, 3.0]), &KroneckerOptions::default()).unwrap();
        assert!(r.value >= 2.0 - 1e-10);
        assert!(r.ratio.unwrap() >= 1.0 - 1e-10);
        assert_eq!(r.kronecker_dims, Some((81, 9)));
    }

    #[test]
    fn sampling_bounds_from_below() {
        let f = catalog_lookup(FunctionId::Inv);
        let a = random_hpd(2, 3, 0.5, 2.0);
        let opts = KroneckerOptions::default();
        let bound = kronecker_norm(&kronecker_second_frechet(&f, &a, &opts).unwrap()).unwrap();
        let mut best = 0.0f64;
        for seed in 0..200 {
            let d = random_directions(DirectionKind::Dense, 2, 2, seed).to_dense();
            let e: Vec<ComplexMatrix> = d.iter().map(|x| x.scale_real(1.0 / x.frobenius())).collect();
            let l = frechet(&f, &a, &DirectionSet::Dense(e), &opts.frechet).unwrap().value;
            best = best.max(l.frobenius());
        }
        assert!(best <= bound * (1.0 + 1e-10), "{best} > {bound}");
        assert!(best >= 0.5 * bound, "{best} vs {bound}");
    }

    #[test]
    fn role_swap_preserves_norm() {
        let f = catalog_lookup(FunctionId::InvSqrt);
        let a = random_hpd(3, 11, 1.0, 5.0);
        let k1 = kronecker_second_frechet(&f, &a, &KroneckerOptions::default()).unwrap();
        let swapped = KroneckerOptions {
            swap_roles: true,
            ..KroneckerOptions::default()
        };
        let k2 = kronecker_second_frechet(&f, &a, &swapped).unwrap();
        let (n1, n2) = (kronecker_norm(&k1).unwrap(), kronecker_norm(&k2).unwrap());
        assert!((n1 - n2).abs() <= 1e-10 * n1);
    }

    #[test]
    fn exp_kronecker_is_real_and_bounded() {
        let f = catalog_lookup(FunctionId::Exp);
        let a = diag(&[-1.0, -2.0]);
        let r = cond2_upper_bound(&f, &a, &KroneckerOptions::default()).unwrap();
        assert!(r.ratio.is_none());
        // ‖L⁽²⁾(A, e₁e₁ᵀ, e₁e₁ᵀ)‖ = e⁻¹
        assert!(r.value >= (-1f64).exp() * (1.0 - 1e-10));
    }

    #[test]
    fn size_cap() {
        let f = catalog_lookup(FunctionId::Inv);
        let opts = KroneckerOptions { cap: 2, ..KroneckerOptions::default() };
        assert!(matches!(
            kronecker_second_frechet(&f, &diag(&[1.0, 2.0, 3.0]), &opts),
            Err(Error::SizeCapExceeded { size: 3, cap: 2 })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn inverse_exact_is_twice_cubed_inverse_norm(seed in 0u64..1000, n in 2usize..8) {
            let f = catalog_lookup(FunctionId::Inv);
            let a = random_hpd(n, seed, 0.5, 6.0);
            match cond2_exact_hpd(&f, &a) {
                Ok(r) => {
                    let opts = PowerOptions { tol: 1e-14, max_iter: 50_000, ..PowerOptions::default() };
                    let s = spectral_norm_with(&inv(&a).unwrap(), opts).unwrap();
                    prop_assert!((r.value - 2.0 * s.powi(3)).abs() <= 1e-9 * r.value);
                }
                Err(Error::MultipleMinEigenvalue { .. }) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn exact_is_unitarily_invariant(seed in 0u64..1000, n in 2usize..7) {
            let f = catalog_lookup(FunctionId::InvSqrt);
            let a = random_hpd(n, seed, 0.5, 6.0);
            let b = random_similarity(&a, seed + 17);
            if let (Ok(x), Ok(y)) = (cond2_exact_hpd(&f, &a), cond2_exact_hpd(&f, &b)) {
                prop_assert!((x.value - y.value).abs() <= 1e-9 * x.value);
            }
        }

        #[test]
        fn bound_never_below_exact(seed in 0u64..1000, n in 1usize..4) {
            let f = catalog_lookup(FunctionId::InvSqrt);
            let a = random_hpd(n, seed, 0.5, 4.0);
            let r = cond2_upper_bound(&f, &a, &KroneckerOptions::default()).unwrap();
            if let Some(ratio) = r.ratio {
                prop_assert!(ratio >= 1.0 - 1e-10, "{ratio}");
            }
        }
    }
}
