//! Dense evaluation of `f(M)` for the catalog functions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functions::{FunctionId, ScalarFunction};
use crate::linalg::{lu_factor, ComplexMatrix};

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120., 60., 12., 1.];
const B5: [f64; 6] = [30240., 15120., 3360., 420., 30., 1.];
const B7: [f64; 8] = [17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.];
const B9: [f64; 10] = [
    17643225600.,
    8821612800.,
    2075673600.,
    302702400.,
    30270240.,
    2162160.,
    110880.,
    3960.,
    90.,
    1.,
];
const B13: [f64; 14] = [
    64764752532480000.,
    32382376266240000.,
    7771770303897600.,
    1187353796428800.,
    129060195264000.,
    10559470521600.,
    670442572800.,
    33522128640.,
    1323241920.,
    40840800.,
    960960.,
    16380.,
    182.,
    1.,
];

fn require_square(m: &ComplexMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", m.nrows(), m.ncols()),
        })
    }
}

fn add_scaled_id(m: &mut ComplexMatrix, s: f64) {
    for i in 0..m.nrows() {
        m[(i, i)] += s;
    }
}

/// `Σ c[2j]·A^{2j}` over the supplied even powers, with `powers[0] = A²`.
fn even_poly(n: usize, powers: &[&ComplexMatrix], coeffs: &[f64]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    add_scaled_id(&mut out, coeffs[0]);
    for (p, c) in powers.iter().zip(coeffs.iter().skip(1)) {
        out.axpy(Complex64::new(*c, 0.0), p);
    }
    out
}

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(a)?;
    let n = a.nrows();
    let norm = a.norm1();
    if !norm.is_finite() {
        return Err(Error::Overflow { norm });
    }
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    for &(deg, theta) in &THETA {
        if norm <= theta {
            let a2 = a.matmul(a);
            let a4 = a2.matmul(&a2);
            let (u, v) = match deg {
                3 => {
                    let u = a.matmul(&even_poly(n, &[&a2], &[B3[1], B3[3]]));
                    (u, even_poly(n, &[&a2], &[B3[0], B3[2]]))
                }
                5 => {
                    let u = a.matmul(&even_poly(n, &[&a2, &a4], &[B5[1], B5[3], B5[5]]));
                    (u, even_poly(n, &[&a2, &a4], &[B5[0], B5[2], B5[4]]))
                }
                7 => {
                    let a6 = a4.matmul(&a2);
                    let u = a.matmul(&even_poly(n, &[&a2, &a4, &a6], &[B7[1], B7[3], B7[5], B7[7]]));
                    (u, even_poly(n, &[&a2, &a4, &a6], &[B7[0], B7[2], B7[4], B7[6]]))
                }
                _ => {
                    let a6 = a4.matmul(&a2);
                    let a8 = a6.matmul(&a2);
                    let odd = [B9[1], B9[3], B9[5], B9[7], B9[9]];
                    let even = [B9[0], B9[2], B9[4], B9[6], B9[8]];
                    let u = a.matmul(&even_poly(n, &[&a2, &a4, &a6, &a8], &odd));
                    (u, even_poly(n, &[&a2, &a4, &a6, &a8], &even))
                }
            };
            return pade_quotient(&u, &v, norm);
        }
    }

    let s = (norm / THETA_13).log2().ceil().max(0.0);
    if s > 1000.0 {
        return Err(Error::Overflow { norm });
    }
    let s = s as i32;
    let scale = 0.5f64.powi(s);
    let a1 = a.scale_real(scale);
    let a2 = a1.matmul(&a1);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let c = |x: f64| Complex64::new(x, 0.0);

    let mut w1 = a6.scale_real(B13[13]);
    w1.axpy(c(B13[11]), &a4);
    w1.axpy(c(B13[9]), &a2);
    let mut w = a6.matmul(&w1);
    w.axpy(c(B13[7]), &a6);
    w.axpy(c(B13[5]), &a4);
    w.axpy(c(B13[3]), &a2);
    add_scaled_id(&mut w, B13[1]);
    let u = a1.matmul(&w);

    let mut z1 = a6.scale_real(B13[12]);
    z1.axpy(c(B13[10]), &a4);
    z1.axpy(c(B13[8]), &a2);
    let mut v = a6.matmul(&z1);
    v.axpy(c(B13[6]), &a6);
    v.axpy(c(B13[4]), &a4);
    v.axpy(c(B13[2]), &a2);
    add_scaled_id(&mut v, B13[0]);

    let mut r = pade_quotient(&u, &v, norm)?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    if !r.is_finite() {
        return Err(Error::Overflow { norm });
    }
    Ok(r)
}

/// `(V − U)⁻¹(V + U)`.
fn pade_quotient(u: &ComplexMatrix, v: &ComplexMatrix, norm: f64) -> Result<ComplexMatrix> {
    let num = v + u;
    let den = v - u;
    let f = lu_factor(&den)?;
    let mut out = num;
    for j in 0..out.ncols() {
        f.solve_in_place(out.col_mut(j));
    }
    if !out.is_finite() {
        return Err(Error::Overflow { norm });
    }
    Ok(out)
}

const DB_TOL: f64 = 1e-14;
const DB_MAX_ITER: usize = 60;

/// Product-form Denman–Beavers iteration returning `(M^{1/2}, M^{-1/2})`.
///
/// Iterates `M ← (2I + M + M⁻¹)/4`, `Y ← Y(I + M⁻¹)/2`, `Z ← Z(I + M⁻¹)/2`
/// from `M = Y = A`, `Z = I`; then `M → I`, `Y → A^{1/2}`, `Z → A^{-1/2}`.
fn denman_beavers(a: &ComplexMatrix, want_root: bool, want_inv: bool) -> Result<(ComplexMatrix, ComplexMatrix)> {
    require_square(a)?;
    let n = a.nrows();
    let mut m = a.clone();
    let mut y = if want_root { a.clone() } else { ComplexMatrix::zeros(0, 0) };
    let mut z = if want_inv { ComplexMatrix::identity(n) } else { ComplexMatrix::zeros(0, 0) };
    let mut prev_change = f64::INFINITY;
    for _ in 0..DB_MAX_ITER {
        let minv = lu_factor(&m)
            .map_err(|_| Error::NonConvergence {
                what: "Denman-Beavers iteration",
                iterations: DB_MAX_ITER,
            })?
            .inverse();
        let mut step = minv.scale_real(0.5);
        add_scaled_id(&mut step, 0.5);
        let mut change: f64 = 0.0;
        if want_root {
            let next = y.matmul(&step);
            change = change.max((&next - &y).frobenius() / next.frobenius());
            y = next;
        }
        if want_inv {
            let next = z.matmul(&step);
            change = change.max((&next - &z).frobenius() / next.frobenius());
            z = next;
        }
        let mut next_m = &m + &minv;
        next_m = next_m.scale_real(0.25);
        add_scaled_id(&mut next_m, 0.5);
        m = next_m;
        if !change.is_finite() {
            break;
        }
        // the second clause accepts rounding-level stagnation
        if change <= DB_TOL || (change <= 1e-10 && change >= prev_change) {
            return Ok((y, z));
        }
        prev_change = change;
    }
    Err(Error::NonConvergence {
        what: "Denman-Beavers iteration",
        iterations: DB_MAX_ITER,
    })
}

pub fn sqrtm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    denman_beavers(a, true, false).map(|p| p.0)
}

pub fn invsqrtm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    denman_beavers(a, false, true).map(|p| p.1)
}

/// Both `A^{1/2}` and `A^{-1/2}` from one iteration.
pub fn sqrtm_pair(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    denman_beavers(a, true, true)
}

pub fn inv(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(a)?;
    Ok(lu_factor(a)?.inverse())
}

pub fn matfun(f: &ScalarFunction, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    match f.id {
        FunctionId::Exp => expm(a),
        FunctionId::Inv => inv(a),
        FunctionId::InvSqrt => invsqrtm(a),
        FunctionId::Sqrt => sqrtm(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::catalog_lookup;
    use crate::linalg::rel_error;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kms(n: usize, rho: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(rho.powi((i as i32 - j as i32).abs()), 0.0))
    }

    /// Q·diag(d)·Qᵀ with a plane rotation Q.
    fn rotated_diag(d: [f64; 2], phi: f64) -> (ComplexMatrix, ComplexMatrix) {
        let (s, c) = phi.sin_cos();
        let q = ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]);
        let a = q.matmul(&ComplexMatrix::from_real_diag(&d)).matmul(&q.transpose());
        (a, q)
    }

    #[test]
    fn exp_trivial_cases() {
        assert_eq!(expm(&ComplexMatrix::zeros(3, 3)).unwrap(), ComplexMatrix::identity(3));
        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let e = expm(&nil).unwrap();
        assert!(rel_error(&e, &ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]])) < 1e-15);
        let d = expm(&ComplexMatrix::from_real_diag(&[1.0, 2.0])).unwrap();
        assert!((d[(0, 0)].re - 1f64.exp()).abs() <= 1e-14 * 1f64.exp());
        assert!((d[(1, 1)].re - 2f64.exp()).abs() <= 1e-14 * 2f64.exp());
    }

    #[test]
    fn exp_every_pade_degree() {
        for scale in [1e-3, 0.1, 0.5, 1.5, 4.0, 40.0] {
            let (a, q) = rotated_diag([scale, -0.5 * scale], 0.3);
            let expect = q
                .matmul(&ComplexMatrix::from_real_diag(&[scale.exp(), (-0.5 * scale).exp()]))
                .matmul(&q.transpose());
            assert!(rel_error(&expm(&a).unwrap(), &expect) < 1e-13, "scale {scale}");
        }
    }

    #[test]
    fn exp_overflow_is_reported() {
        let a = ComplexMatrix::from_real_diag(&[1e300, 1.0]);
        assert!(matches!(expm(&a), Err(Error::Overflow { .. })));
    }

    #[test]
    fn sqrt_examples() {
        let i = ComplexMatrix::identity(3);
        assert!(rel_error(&sqrtm(&i).unwrap(), &i) < 1e-15);
        assert!(rel_error(&invsqrtm(&i).unwrap(), &i) < 1e-15);
        let d = sqrtm(&ComplexMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!(rel_error(&d, &ComplexMatrix::from_real_diag(&[2.0, 3.0])) < 1e-14);
        let j = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[0.0, 2.0]]);
        let r2 = 2f64.sqrt();
        let expect = ComplexMatrix::from_real_rows(&[&[r2, 1.0 / (2.0 * r2)], &[0.0, r2]]);
        assert!(rel_error(&sqrtm(&j).unwrap(), &expect) < 1e-14);
    }

    #[test]
    fn sqrt_on_negative_axis_fails() {
        let a = ComplexMatrix::from_real_diag(&[-1.0, 4.0]);
        assert!(matches!(sqrtm(&a), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn dispatch() {
        let f = catalog_lookup(FunctionId::Inv);
        let d = matfun(&f, &ComplexMatrix::from_real_diag(&[2.0, 4.0])).unwrap();
        assert!(rel_error(&d, &ComplexMatrix::from_real_diag(&[0.5, 0.25])) < 1e-16);
        let e = matfun(&catalog_lookup(FunctionId::Exp), &ComplexMatrix::zeros(2, 2)).unwrap();
        assert_eq!(e, ComplexMatrix::identity(2));
        let a = kms(8, 0.5);
        let z = matfun(&catalog_lookup(FunctionId::InvSqrt), &a).unwrap();
        let prod = z.matmul(&z).matmul(&a);
        assert!(rel_error(&prod, &ComplexMatrix::identity(8)) < 1e-11);
    }

    #[test]
    fn eigenvalue_mapping_on_rotated_diagonal() {
        let (a, q) = rotated_diag([2.0, 7.0], 0.7);
        for id in FunctionId::ALL {
            let f = catalog_lookup(id);
            let d = [(f.f)(Complex64::new(2.0, 0.0)), (f.f)(Complex64::new(7.0, 0.0))];
            let expect = q.matmul(&ComplexMatrix::from_diag(&d)).matmul(&q.transpose());
            assert!(rel_error(&matfun(&f, &a).unwrap(), &expect) < 1e-12, "{id}");
        }
    }

    fn random_matrix(n: usize, seed: u64, scale: f64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn exp_of_negation_is_inverse(seed in 0u64..1000, n in 1usize..8, scale in 0.01f64..2.5) {
            let a = random_matrix(n, seed, scale);
            let prod = expm(&a).unwrap().matmul(&expm(&(-&a)).unwrap());
            prop_assert!(rel_error(&prod, &ComplexMatrix::identity(n)) < 1e-11);
        }

        #[test]
        fn sqrt_identities(seed in 0u64..1000, n in 1usize..8) {
            // diagonally dominant shift keeps the spectrum in the right half-plane
            let a = random_matrix(n, seed, 1.0).shifted(Complex64::new(2.0 * n as f64, 0.0));
            let (r, ri) = sqrtm_pair(&a).unwrap();
            prop_assert!(rel_error(&r.matmul(&r), &a) < 1e-11);
            prop_assert!(rel_error(&ri.matmul(&r), &ComplexMatrix::identity(n)) < 1e-11);
        }
    }
}
