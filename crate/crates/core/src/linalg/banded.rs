//! Banded LU with partial pivoting, used for vector solves with shifted
//! banded matrices (tridiagonal gallery members and the like).
//!
//! Row interchanges only touch the active part of each row, so `L` is kept in
//! product form: `M = P₁L₁P₂L₂⋯PₙLₙU`. Pivoting widens the upper bandwidth of
//! `U` to `ku + kl`.

use num_complex::Complex64;

use super::lu::{LuFactors, UNIT_ROUNDOFF};
use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    /// upper bandwidth of U after pivoting
    ku2: usize,
    width: usize,
    /// row-window storage: entry (r, c) for c in [r-kl, r+ku2]
    data: Vec<Complex64>,
    piv: Vec<usize>,
}

impl BandedLu {
    /// Factors `A + shift·I`, where `A` has lower/upper bandwidth `(kl, ku)`.
    pub fn factor_shifted(
        a: &ComplexMatrix,
        shift: Complex64,
        (kl, ku): (usize, usize),
        pivot_threshold: Option<f64>,
    ) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                actual: format!("{}x{}", a.nrows(), a.ncols()),
            });
        }
        let n = a.nrows();
        let ku2 = ku + kl;
        let width = kl + ku2 + 1;
        let mut f = Self {
            n,
            kl,
            ku2,
            width,
            data: vec![ZERO; n * width],
            piv: vec![0; n],
        };
        let mut fro_sq = 0.0;
        for r in 0..n {
            for c in r.saturating_sub(kl)..=(r + ku).min(n - 1) {
                let mut v = a[(r, c)];
                if r == c {
                    v += shift;
                }
                fro_sq += v.norm_sqr();
                *f.at_mut(r, c) = v;
            }
        }
        let threshold = pivot_threshold.unwrap_or(n as f64 * UNIT_ROUNDOFF * fro_sq.sqrt());

        for i in 0..n {
            let last = (i + kl).min(n - 1);
            let (p, pmod) = (i..=last)
                .map(|r| (r, f.at(r, i).norm()))
                .fold((i, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmod.is_nan() || pmod <= threshold || pmod == 0.0 {
                return Err(Error::SingularMatrix {
                    pivot: i,
                    modulus: pmod.max(0.0),
                    threshold,
                });
            }
            f.piv[i] = p;
            let cmax = (i + ku2).min(n - 1);
            if p != i {
                for c in i..=cmax {
                    let (x, y) = (f.idx(i, c), f.idx(p, c));
                    f.data.swap(x, y);
                }
            }
            let pivot = f.at(i, i);
            for r in i + 1..=last {
                let l = f.at(r, i) / pivot;
                *f.at_mut(r, i) = l;
                if l == ZERO {
                    continue;
                }
                for c in i + 1..=cmax {
                    let u = f.at(i, c);
                    *f.at_mut(r, c) -= l * u;
                }
            }
        }
        Ok(f)
    }

    #[inline]
    fn idx(&self, r: usize, c: usize) -> usize {
        debug_assert!(c + self.kl >= r && c <= r + self.ku2);
        r * self.width + (c + self.kl - r)
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[self.idx(r, c)]
    }

    #[inline]
    fn at_mut(&mut self, r: usize, c: usize) -> &mut Complex64 {
        let i = self.idx(r, c);
        &mut self.data[i]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for i in 0..n {
            b.swap(i, self.piv[i]);
            let bi = b[i];
            if bi == ZERO {
                continue;
            }
            for r in i + 1..=(i + self.kl).min(n - 1) {
                b[r] -= self.at(r, i) * bi;
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for c in i + 1..=(i + self.ku2).min(n - 1) {
                s -= self.at(i, c) * b[c];
            }
            b[i] = s / self.at(i, i);
        }
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve_adjoint_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for i in 0..n {
            let mut s = b[i];
            for c in i.saturating_sub(self.ku2)..i {
                s -= self.at(c, i).conj() * b[c];
            }
            b[i] = s / self.at(i, i).conj();
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for r in i + 1..=(i + self.kl).min(n - 1) {
                s -= self.at(r, i).conj() * b[r];
            }
            b[i] = s;
            b.swap(i, self.piv[i]);
        }
    }
}

/// A factored shifted matrix that can apply its inverse and inverse adjoint to vectors.
pub trait ShiftedSolver {
    fn dim(&self) -> usize;
    fn solve_vec(&self, b: &mut [Complex64]);
    fn solve_adjoint_vec(&self, b: &mut [Complex64]);
    /// Approximate complex multiply-adds of one vector solve.
    fn solve_cost(&self) -> u64;
    /// Approximate complex multiply-adds of the factorization.
    fn factor_cost(&self) -> u64;
}

impl ShiftedSolver for LuFactors {
    fn dim(&self) -> usize {
        LuFactors::dim(self)
    }

    fn solve_vec(&self, b: &mut [Complex64]) {
        self.solve_in_place(b)
    }

    fn solve_adjoint_vec(&self, b: &mut [Complex64]) {
        self.solve_adjoint_in_place(b)
    }

    fn solve_cost(&self) -> u64 {
        let n = self.dim() as u64;
        n * n
    }

    fn factor_cost(&self) -> u64 {
        let n = self.dim() as u64;
        n * n * n / 3
    }
}

impl ShiftedSolver for BandedLu {
    fn dim(&self) -> usize {
        self.n
    }

    fn solve_vec(&self, b: &mut [Complex64]) {
        self.solve_in_place(b)
    }

    fn solve_adjoint_vec(&self, b: &mut [Complex64]) {
        self.solve_adjoint_in_place(b)
    }

    fn solve_cost(&self) -> u64 {
        (self.n * (self.kl + self.ku2 + 1)) as u64
    }

    fn factor_cost(&self) -> u64 {
        (self.n * self.kl.max(1) * (self.ku2 + 1)) as u64
    }
}

/// Whether a banded factorization pays off for bandwidths `(kl, ku)` at size `n`.
pub fn prefer_banded(n: usize, (kl, ku): (usize, usize)) -> bool {
    n >= 8 && 2 * kl + ku < n / 4
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lu::lu_factor;
    use crate::linalg::matrix::vec_norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_banded(n: usize, kl: usize, ku: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::from_fn(n, n, |i, j| {
            if i > j + kl || j > i + ku {
                ZERO
            } else {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            }
        })
    }

    fn rhs(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn banded_matches_dense_solves() {
        for &(kl, ku) in &[(1, 1), (2, 1), (0, 3), (1, 0), (3, 2)] {
            let a = random_banded(30, kl, ku, 5 + kl as u64);
            let shift = Complex64::new(0.3, -0.7);
            let banded = BandedLu::factor_shifted(&a, shift, a.bandwidths(), None).unwrap();
            let dense = lu_factor(&a.shifted(shift)).unwrap();
            let b = rhs(30, 9);

            let mut x1 = b.clone();
            banded.solve_in_place(&mut x1);
            let mut x2 = b.clone();
            dense.solve_in_place(&mut x2);
            let d: Vec<_> = x1.iter().zip(&x2).map(|(p, q)| p - q).collect();
            assert!(vec_norm(&d) <= 1e-11 * vec_norm(&x2), "kl={kl} ku={ku}");

            let mut y1 = b.clone();
            banded.solve_adjoint_in_place(&mut y1);
            let mut y2 = b.clone();
            dense.solve_adjoint_in_place(&mut y2);
            let d: Vec<_> = y1.iter().zip(&y2).map(|(p, q)| p - q).collect();
            assert!(vec_norm(&d) <= 1e-11 * vec_norm(&y2), "adjoint kl={kl} ku={ku}");
        }
    }

    #[test]
    fn banded_detects_singular_shift() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 2.0, 3.0]);
        let r = BandedLu::factor_shifted(&a, Complex64::new(-2.0, 0.0), (0, 0), None);
        assert!(matches!(r, Err(Error::SingularMatrix { pivot: 1, .. })));
    }

    #[test]
    fn pivoting_path_is_exercised() {
        // tiny diagonal forces a swap at every step
        let n = 12;
        let a = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1e-3, 0.0)
            } else if i == j + 1 || j == i + 1 {
                Complex64::new(1.0, 0.5)
            } else {
                ZERO
            }
        });
        let banded = BandedLu::factor_shifted(&a, ZERO, (1, 1), None).unwrap();
        assert!(banded.piv.iter().enumerate().any(|(i, &p)| p != i));
        let b = rhs(n, 2);
        let mut x = b.clone();
        banded.solve_in_place(&mut x);
        let r: Vec<_> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(vec_norm(&r) < 1e-12);
    }
}
