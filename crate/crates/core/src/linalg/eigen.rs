//! Eigenvalues of Hermitian matrices: cyclic Jacobi for moderate sizes and
//! (inverse) power iteration beyond.

use num_complex::Complex64;

use super::lu::lu_factor;
use super::matrix::{dot_conj, vec_norm, ComplexMatrix, ZERO};
use super::norms::{dominant_hermitian, random_unit_vector, PowerOptions};
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest dimension handled by the dense Jacobi solver in [`extreme_eigenvalues_hermitian`].
pub const JACOBI_MAX_DIM: usize = 128;

/// Relative asymmetry `‖M − Mᴴ‖_F / ‖M‖_F`.
pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    let nm = m.frobenius();
    if nm == 0.0 {
        return 0.0;
    }
    (m - &m.adjoint()).frobenius() / nm
}

pub fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    let asymmetry = hermitian_defect(m);
    if asymmetry > HERMITIAN_TOL {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

pub fn extreme_eigenvalues_hermitian(m: &ComplexMatrix) -> Result<(f64, f64)> {
    extreme_eigenvalues_hermitian_with(m, PowerOptions::default())
}

/// `(λ_min, λ_max)` of a Hermitian matrix.
///
/// Up to [`JACOBI_MAX_DIM`] all eigenvalues are computed by Jacobi rotations.
/// Beyond, the dominant eigenvalue comes from power iteration and the opposite end of
/// the spectrum from power iteration on the shifted matrix. When the spectrum
/// is one-signed, the end nearest zero is refined by inverse iteration.
pub fn extreme_eigenvalues_hermitian_with(m: &ComplexMatrix, opts: PowerOptions) -> Result<(f64, f64)> {
    check_hermitian(m)?;
    let n = m.nrows();
    if n == 1 {
        let x = m[(0, 0)].re;
        return Ok((x, x));
    }
    if n <= JACOBI_MAX_DIM {
        let ev = hermitian_eigenvalues(m)?;
        return Ok((ev[0], ev[n - 1]));
    }
    if m.frobenius() == 0.0 {
        return Err(Error::SingularMatrix {
            pivot: 0,
            modulus: 0.0,
            threshold: 0.0,
        });
    }
    let (mu, _) = dominant_hermitian(n, |x| m.matvec(x), opts)?;
    let shifted = m.shifted(Complex64::new(-mu, 0.0));
    let rough = PowerOptions { tol: 1e-6, ..opts };
    let (nu, _) = dominant_hermitian(n, |x| shifted.matvec(x), rough)?;
    let other = mu + nu;
    let (mut lo, mut hi) = if other < mu { (other, mu) } else { (mu, other) };

    // ends within this distance of zero are refined by inverse iteration
    let near_zero = 1e-4 * mu.abs();
    if lo > -near_zero {
        let refined = smallest_modulus(m, opts)?;
        if (refined - lo).abs() <= near_zero {
            lo = refined;
        } else {
            lo = precise_other_end(&shifted, mu, n, opts)?;
        }
    } else if hi < near_zero {
        let refined = smallest_modulus(m, opts)?;
        if (refined - hi).abs() <= near_zero {
            hi = refined;
        } else {
            hi = precise_other_end(&shifted, mu, n, opts)?;
        }
    } else {
        let other = precise_other_end(&shifted, mu, n, opts)?;
        if other < mu {
            lo = other;
        } else {
            hi = other;
        }
    }
    Ok((lo, hi))
}

/// All eigenvalues in ascending order, by cyclic Jacobi on the real symmetric
/// embedding `[[Re M, −Im M], [Im M, Re M]]`, whose spectrum is that of `M` doubled.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let n = m.nrows();
    let d = 2 * n;
    // row-major embedding, symmetrized
    let mut a = vec![0.0f64; d * d];
    for i in 0..n {
        for j in 0..n {
            let z = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            a[i * d + j] = z.re;
            a[(i + n) * d + j + n] = z.re;
            a[(i + n) * d + j] = z.im;
            a[i * d + j + n] = -z.im;
        }
    }
    let total: f64 = a.iter().map(|x| x * x).sum();
    const MAX_SWEEPS: usize = 100;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * d + j].powi(2))
            .sum();
        if off <= (4.0 * f64::EPSILON).powi(2) * total {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let (akp, akq) = (a[k * d + p], a[k * d + q]);
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let (apk, aqk) = (a[p * d + k], a[q * d + k]);
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "Jacobi eigenvalue iteration",
            iterations: MAX_SWEEPS,
        });
    }
    let mut ev: Vec<f64> = (0..d).map(|i| a[i * d + i]).collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    Ok(ev.into_iter().step_by(2).collect())
}

fn precise_other_end(shifted: &ComplexMatrix, mu: f64, n: usize, opts: PowerOptions) -> Result<f64> {
    let (nu, _) = dominant_hermitian(n, |x| shifted.matvec(x), opts)?;
    Ok(mu + nu)
}

/// Eigenvalue of smallest modulus by inverse iteration.
fn smallest_modulus(m: &ComplexMatrix, opts: PowerOptions) -> Result<f64> {
    let f = lu_factor(m)?;
    let (inv, _) = dominant_hermitian(
        m.nrows(),
        |x| {
            let mut y = x.to_vec();
            f.solve_in_place(&mut y);
            y
        },
        opts,
    )?;
    Ok(1.0 / inv)
}

/// The two smallest eigenvalues of an HPD matrix, via two-vector subspace
/// inverse iteration with a 2×2 Rayleigh–Ritz step.
pub fn two_smallest_hpd(m: &ComplexMatrix, opts: PowerOptions) -> Result<(f64, f64)> {
    check_hermitian(m)?;
    let n = m.nrows();
    if n < 2 {
        return Err(Error::BadParams("need n >= 2 for two eigenvalues".into()));
    }
    let f = lu_factor(m)?;
    let mut v1 = random_unit_vector(n, opts.seed);
    let mut v2 = random_unit_vector(n, opts.seed.wrapping_add(1));
    orthonormalize(&mut v1, &mut v2);
    let mut prev = (f64::NAN, f64::NAN);
    for _ in 0..opts.max_iter {
        f.solve_in_place(&mut v1);
        f.solve_in_place(&mut v2);
        orthonormalize(&mut v1, &mut v2);
        let w1 = m.matvec(&v1);
        let w2 = m.matvec(&v2);
        let h11 = dot_conj(&v1, &w1).re;
        let h22 = dot_conj(&v2, &w2).re;
        let h12 = dot_conj(&v1, &w2);
        // eigen-decomposition of the Hermitian 2×2 Ritz matrix
        let mean = 0.5 * (h11 + h22);
        let rad = (0.25 * (h11 - h22).powi(2) + h12.norm_sqr()).sqrt();
        let ritz = (mean - rad, mean + rad);
        // rotate the basis onto the Ritz vectors
        if h12.norm() > 0.0 {
            let (a, b) = (h11 - ritz.0, h12);
            // (H - θ₁I) y = 0  →  y ∝ (b, -a) up to the first row
            let y = [b, Complex64::new(-a, 0.0)];
            let ny = (y[0].norm_sqr() + y[1].norm_sqr()).sqrt();
            if ny > 0.0 {
                let (c0, c1) = (y[0] / ny, y[1] / ny);
                let r1: Vec<_> = v1.iter().zip(&v2).map(|(p, q)| p * c0 + q * c1).collect();
                let r2: Vec<_> = v1
                    .iter()
                    .zip(&v2)
                    .map(|(p, q)| p * (-c1.conj()) + q * c0.conj())
                    .collect();
                v1 = r1;
                v2 = r2;
            }
        } else if h22 < h11 {
            std::mem::swap(&mut v1, &mut v2);
        }
        let scale = ritz.1.abs().max(f64::MIN_POSITIVE);
        if (ritz.0 - prev.0).abs() <= opts.tol * scale && (ritz.1 - prev.1).abs() <= opts.tol * scale {
            return Ok(ritz);
        }
        prev = ritz;
    }
    Err(Error::NonConvergence {
        what: "two-vector inverse iteration",
        iterations: opts.max_iter,
    })
}

fn orthonormalize(v1: &mut [Complex64], v2: &mut [Complex64]) {
    let n1 = vec_norm(v1);
    v1.iter_mut().for_each(|z| *z /= n1);
    for _ in 0..2 {
        let p = dot_conj(v1, v2);
        for (b, a) in v2.iter_mut().zip(v1.iter()) {
            *b -= a * p;
        }
    }
    let n2 = vec_norm(v2);
    if n2 == 0.0 {
        v2.iter_mut().for_each(|z| *z = ZERO);
        v2[v2.len() - 1] = Complex64::new(1.0, 0.0);
        return orthonormalize(v1, v2);
    }
    v2.iter_mut().for_each(|z| *z /= n2);
}
