//! Reference methods: the block Kronecker-structured matrix `X_k`, the
//! complex-step method, the closed-form derivative of the inverse, and a
//! recursive finite-difference oracle.

use num_complex::Complex64;

use crate::engine::{check_order, for_each_permutation, DirectionSet, DEFAULT_MAX_ORDER};
use crate::error::{Error, Result};
use crate::functions::ScalarFunction;
use crate::linalg::{lu_factor, ComplexMatrix};
use crate::matfun::matfun;

pub const DEFAULT_SIZE_CAP: usize = 4096;

/// `X_0 = A`, `X_k = I₂ ⊗ X_{k−1} + [[0,1],[0,0]] ⊗ I_{2^{k−1}} ⊗ E_k`.
pub fn build_x(a: &ComplexMatrix, e: &[ComplexMatrix], cap: usize) -> Result<ComplexMatrix> {
    let n = a.nrows();
    let size = (1usize << e.len().min(40)).saturating_mul(n);
    if size > cap {
        return Err(Error::SizeCapExceeded { size, cap });
    }
    let mut x = a.clone();
    for ek in e {
        let half = x.nrows();
        let mut next = ComplexMatrix::zeros(2 * half, 2 * half);
        next.set_block(0, 0, &x);
        next.set_block(half, half, &x);
        for b in 0..half / n {
            next.set_block(b * n, half + b * n, ek);
        }
        x = next;
    }
    Ok(x)
}

fn check_inputs(a: &ComplexMatrix, dirs: &DirectionSet) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    check_order(dirs.k(), DEFAULT_MAX_ORDER)?;
    dirs.validate(a.nrows())
}

/// Upper-right `n×n` block of `f(X_k)`.
pub fn frechet_hr(f: &ScalarFunction, a: &ComplexMatrix, dirs: &DirectionSet) -> Result<ComplexMatrix> {
    frechet_hr_with_cap(f, a, dirs, DEFAULT_SIZE_CAP)
}

pub fn frechet_hr_with_cap(f: &ScalarFunction, a: &ComplexMatrix, dirs: &DirectionSet, cap: usize) -> Result<ComplexMatrix> {
    check_inputs(a, dirs)?;
    let n = a.nrows();
    let x = build_x(a, &dirs.to_dense(), cap)?;
    let fx = matfun(f, &x)?;
    Ok(fx.block(0, x.nrows() - n, n, n))
}

/// Default complex step `2^{-27}·‖A‖_F / max_i ‖E_i‖_F`, with `‖A‖_F` floored at 1.
pub fn default_complex_step(a: &ComplexMatrix, dirs: &DirectionSet) -> f64 {
    let emax = dirs.norms().into_iter().fold(0.0, f64::max);
    let scale = a.frobenius().max(1.0);
    if emax == 0.0 {
        2f64.powi(-27) * scale
    } else {
        2f64.powi(-27) * scale / emax
    }
}

/// `(1/h)·Im` of the upper-right block of `f(X_{k−1})` built from `A + ihE_k`.
pub fn frechet_complex_step(
    f: &ScalarFunction,
    a: &ComplexMatrix,
    dirs: &DirectionSet,
    h: Option<f64>,
) -> Result<ComplexMatrix> {
    check_inputs(a, dirs)?;
    if !a.is_real() || !dirs.is_real() {
        return Err(Error::ComplexInputRejected);
    }
    let h = h.unwrap_or_else(|| default_complex_step(a, dirs));
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::BadParams(format!("complex step must be positive, got {h}")));
    }
    let n = a.nrows();
    let e = dirs.to_dense();
    let k = e.len();
    let mut x0 = a.clone();
    x0.axpy(Complex64::new(0.0, h), &e[k - 1]);
    let x = build_x(&x0, &e[..k - 1], DEFAULT_SIZE_CAP)?;
    let fx = matfun(f, &x)?;
    let block = fx.block(0, x.nrows() - n, n, n);
    Ok(block.im().scale_real(1.0 / h))
}

/// `Σ_π R E_{π1} R ⋯ E_{πk} R` for `R = (ζI − A)⁻¹`, the k-th derivative of the
/// resolvent with respect to `A`; `k = 0` gives `R`.
pub fn resolvent_frechet(zeta: Complex64, a: &ComplexMatrix, e: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let r = lu_factor(&(-a).shifted(zeta))?.inverse();
    Ok(permutation_chain(&r, e))
}

fn permutation_chain(r: &ComplexMatrix, e: &[ComplexMatrix]) -> ComplexMatrix {
    if e.is_empty() {
        return r.clone();
    }
    let re: Vec<ComplexMatrix> = e.iter().map(|ei| r.matmul(ei)).collect();
    let n = r.nrows();
    let mut sum = ComplexMatrix::zeros(n, n);
    for_each_permutation(e.len(), |p| {
        let mut prod = re[p[0]].clone();
        for &i in &p[1..] {
            prod = prod.matmul(&re[i]);
        }
        sum += &prod.matmul(r);
    });
    sum
}

/// `(−1)^k Σ_π A⁻¹E_{π1}A⁻¹ ⋯ E_{πk}A⁻¹`.
pub fn frechet_inverse_closed_form(a: &ComplexMatrix, dirs: &DirectionSet) -> Result<ComplexMatrix> {
    check_inputs(a, dirs)?;
    let ainv = lu_factor(a)?.inverse();
    let sum = permutation_chain(&ainv, &dirs.to_dense());
    let sign = if dirs.k() % 2 == 1 { -1.0 } else { 1.0 };
    Ok(sum.scale_real(sign))
}

/// Recursive central differences of step `h` in each direction.
pub fn frechet_fd_recursive(f: &ScalarFunction, a: &ComplexMatrix, dirs: &DirectionSet, h: f64) -> Result<ComplexMatrix> {
    check_inputs(a, dirs)?;
    fd_level(f, a, &dirs.to_dense(), h)
}

fn fd_level(f: &ScalarFunction, a: &ComplexMatrix, e: &[ComplexMatrix], h: f64) -> Result<ComplexMatrix> {
    let Some((last, rest)) = e.split_last() else {
        return matfun(f, a);
    };
    let step = Complex64::new(h, 0.0);
    let mut plus = a.clone();
    plus.axpy(step, last);
    let mut minus = a.clone();
    minus.axpy(-step, last);
    let d = &fd_level(f, &plus, rest, h)? - &fd_level(f, &minus, rest, h)?;
    Ok(d.scale_real(0.5 / h))
}
