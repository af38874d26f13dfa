use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{dot_conj, vec_norm, ComplexMatrix};
use crate::error::{Error, Result};

/// Stopping rules for the power iterations used by the norm and eigenvalue estimators.
#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 5000,
            seed: 0x5eed_cafe,
        }
    }
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.frobenius()
}

pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    spectral_norm_with(m, PowerOptions::default())
}

/// Largest singular value by power iteration on `MᴴM`.
pub fn spectral_norm_with(m: &ComplexMatrix, opts: PowerOptions) -> Result<f64> {
    if m.frobenius() == 0.0 {
        return Ok(0.0);
    }
    if m.ncols() == 1 || m.nrows() == 1 {
        return Ok(m.frobenius());
    }
    let (lambda, _) = dominant_hermitian(m.ncols(), |x| m.adjoint_matvec(&m.matvec(x)), opts)?;
    Ok(lambda.max(0.0).sqrt())
}

pub(crate) fn random_unit_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let nv = vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= nv);
    v
}

/// Dominant (largest modulus) eigenpair of a Hermitian operator given by its action.
///
/// Stops when the residual is below `tol·|ρ|`, or when the Rayleigh-quotient
/// error extrapolated from two successive changes drops below `tol·|ρ|`.
pub fn dominant_hermitian(
    n: usize,
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    opts: PowerOptions,
) -> Result<(f64, Vec<Complex64>)> {
    let mut v = random_unit_vector(n, opts.seed);
    let mut prev_rho = f64::NAN;
    let mut prev_change = f64::NAN;
    for _ in 0..opts.max_iter {
        let w = apply(&v);
        let rho = dot_conj(&v, &w).re;
        let resid: f64 = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| (wi - vi * rho).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let nw = vec_norm(&w);
        if nw == 0.0 {
            return Ok((0.0, v));
        }
        if resid <= opts.tol * rho.abs() {
            return Ok((rho, v));
        }
        let change = (rho - prev_rho).abs();
        if change.is_finite() && prev_change.is_finite() && prev_change > 0.0 {
            let q = (change / prev_change).min(0.999_999);
            let est = change * q / (1.0 - q);
            if est <= opts.tol * rho.abs() {
                return Ok((rho, v));
            }
        }
        if change == 0.0 && prev_change == 0.0 {
            return Ok((rho, v));
        }
        prev_change = change;
        prev_rho = rho;
        v = w.into_iter().map(|z| z / nw).collect();
    }
    Err(Error::NonConvergence {
        what: "power iteration",
        iterations: opts.max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_norms() {
        for n in [1, 3, 7] {
            let i = ComplexMatrix::identity(n);
            assert!((frobenius_norm(&i) - (n as f64).sqrt()).abs() < 1e-15);
            assert!((spectral_norm(&i).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_spectral_norm() {
        let d = ComplexMatrix::from_real_diag(&[1.0, -3.0]);
        assert!((spectral_norm(&d).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn rank_one_spectral_norm() {
        let u = random_unit_vector(6, 1).iter().map(|z| z * 2.5).collect::<Vec<_>>();
        let v = random_unit_vector(6, 2).iter().map(|z| z * 0.3).collect::<Vec<_>>();
        let m = ComplexMatrix::outer(&u, &v);
        let expect = vec_norm(&u) * vec_norm(&v);
        assert!((spectral_norm(&m).unwrap() - expect).abs() <= 1e-10 * expect);
    }

    #[test]
    fn zero_matrix_has_zero_norm() {
        assert_eq!(spectral_norm(&ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn non_convergence_is_reported() {
        let d = ComplexMatrix::from_real_diag(&[1.0, 0.999_999, 0.5]);
        let opts = PowerOptions {
            tol: 1e-15,
            max_iter: 3,
            ..Default::default()
        };
        assert!(matches!(
            spectral_norm_with(&d, opts),
            Err(Error::NonConvergence { .. })
        ));
    }
}
