//! Dense LU factorization with partial (row) pivoting.
//!
//! `P·M = L·U` where `L` is unit lower triangular, `U` upper triangular and
//! `P` is stored as the index sequence `perm` with `(P·M)[i, :] = M[perm[i], :]`.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Which triangular pieces [`LuFactors::solve`] applies to the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// `M⁻¹ B = U⁻¹ L⁻¹ P B`
    Full,
    /// `L⁻¹ P B`
    LowerOnly,
    /// `U⁻¹ B`
    UpperOnly,
    /// `M⁻ᴴ B`
    Adjoint,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LuOptions {
    /// Absolute pivot modulus below which the matrix is declared singular.
    /// Defaults to `n·u·‖M‖_F`.
    pub pivot_threshold: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct LuFactors {
    /// Strictly lower part holds `L` (unit diagonal implied), upper part holds `U`.
    lu: ComplexMatrix,
    perm: Vec<usize>,
    threshold: f64,
}

pub fn lu_factor(m: &ComplexMatrix) -> Result<LuFactors> {
    lu_factor_with(m, LuOptions::default())
}

pub fn lu_factor_with(m: &ComplexMatrix, opts: LuOptions) -> Result<LuFactors> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    let n = m.nrows();
    let threshold = opts
        .pivot_threshold
        .unwrap_or(n as f64 * UNIT_ROUNDOFF * m.frobenius());
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let (p, pmod) = a.col(k)[k..]
            .iter()
            .enumerate()
            .map(|(i, z)| (i + k, z.norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmod.is_nan() || pmod <= threshold || pmod == 0.0 {
            return Err(Error::SingularMatrix {
                pivot: k,
                modulus: pmod.max(0.0),
                threshold,
            });
        }
        if p != k {
            perm.swap(k, p);
            for j in 0..n {
                let col = a.col_mut(j);
                col.swap(k, p);
            }
        }
        let pivot = a[(k, k)];
        let inv = ONE / pivot;
        for x in &mut a.col_mut(k)[k + 1..] {
            *x *= inv;
        }
        for j in k + 1..n {
            let akj = a[(k, j)];
            if akj == ZERO {
                continue;
            }
            let (left, right) = a.as_mut_slice().split_at_mut(j * n);
            let lcol = &left[k * n + k + 1..k * n + n];
            let dst = &mut right[k + 1..n];
            for (d, &l) in dst.iter_mut().zip(lcol) {
                *d -= l * akj;
            }
        }
    }
    Ok(LuFactors { lu: a, perm, threshold })
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn l(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[(i, j)],
            std::cmp::Ordering::Equal => ONE,
            std::cmp::Ordering::Less => ZERO,
        })
    }

    pub fn u(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| if i <= j { self.lu[(i, j)] } else { ZERO })
    }

    pub fn p(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut p = ComplexMatrix::zeros(n, n);
        for (i, &pi) in self.perm.iter().enumerate() {
            p[(i, pi)] = ONE;
        }
        p
    }

    fn check_rows(&self, b: &ComplexMatrix) -> Result<()> {
        if b.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", self.dim()),
                actual: format!("{} rows", b.nrows()),
            });
        }
        Ok(())
    }

    fn check_cols(&self, b: &ComplexMatrix) -> Result<()> {
        if b.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} columns", self.dim()),
                actual: format!("{} columns", b.ncols()),
            });
        }
        Ok(())
    }

    pub fn solve(&self, b: &ComplexMatrix, mode: SolveMode) -> Result<ComplexMatrix> {
        self.check_rows(b)?;
        let mut x = b.clone();
        for j in 0..x.ncols() {
            let col = x.col_mut(j);
            match mode {
                SolveMode::Full => {
                    self.apply_lower_perm(col);
                    self.apply_upper(col);
                }
                SolveMode::LowerOnly => self.apply_lower_perm(col),
                SolveMode::UpperOnly => self.apply_upper(col),
                SolveMode::Adjoint => self.apply_adjoint(col),
            }
        }
        Ok(x)
    }

    /// `M⁻¹ b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        assert_eq!(b.len(), self.dim());
        self.apply_lower_perm(b);
        self.apply_upper(b);
    }

    /// `M⁻ᴴ b` in place.
    pub fn solve_adjoint_in_place(&self, b: &mut [Complex64]) {
        assert_eq!(b.len(), self.dim());
        self.apply_adjoint(b);
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let mut x = ComplexMatrix::identity(self.dim());
        for j in 0..self.dim() {
            self.solve_in_place(x.col_mut(j));
        }
        x
    }

    fn apply_lower_perm(&self, b: &mut [Complex64]) {
        let n = self.dim();
        let permuted: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        b.copy_from_slice(&permuted);
        for k in 0..n {
            let bk = b[k];
            if bk == ZERO {
                continue;
            }
            for (bi, &l) in b[k + 1..].iter_mut().zip(&self.lu.col(k)[k + 1..]) {
                *bi -= l * bk;
            }
        }
    }

    fn apply_upper(&self, b: &mut [Complex64]) {
        let n = self.dim();
        for k in (0..n).rev() {
            let col = self.lu.col(k);
            b[k] /= col[k];
            let bk = b[k];
            if bk == ZERO {
                continue;
            }
            for (bi, &u) in b[..k].iter_mut().zip(&col[..k]) {
                *bi -= u * bk;
            }
        }
    }

    fn apply_adjoint(&self, b: &mut [Complex64]) {
        let n = self.dim();
        // Uᴴ z = b, forward; row k of Uᴴ is conj of column k of U
        for k in 0..n {
            let col = self.lu.col(k);
            let s: Complex64 = col[..k].iter().zip(&b[..k]).map(|(u, x)| u.conj() * x).sum();
            b[k] = (b[k] - s) / col[k].conj();
        }
        // Lᴴ w = z, backward
        for k in (0..n).rev() {
            let col = self.lu.col(k);
            let s: Complex64 = col[k + 1..].iter().zip(&b[k + 1..]).map(|(l, x)| l.conj() * x).sum();
            b[k] -= s;
        }
        // x = Pᵀ w
        let mut x = vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = b[i];
        }
        b.copy_from_slice(&x);
    }

    /// `B U⁻¹`.
    pub fn right_solve_upper(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_cols(b)?;
        let n = self.dim();
        let mut x = b.clone();
        for j in 0..n {
            for i in 0..j {
                let u = self.lu[(i, j)];
                if u == ZERO {
                    continue;
                }
                let (left, right) = x.as_mut_slice().split_at_mut(j * b.nrows());
                let src = &left[i * b.nrows()..(i + 1) * b.nrows()];
                for (d, &s) in right[..b.nrows()].iter_mut().zip(src) {
                    *d -= s * u;
                }
            }
            let inv = ONE / self.lu[(j, j)];
            for d in x.col_mut(j) {
                *d *= inv;
            }
        }
        Ok(x)
    }

    /// `B L⁻¹ P`.
    pub fn right_solve_lower_perm(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_cols(b)?;
        let n = self.dim();
        let r = b.nrows();
        let mut x = b.clone();
        for j in (0..n).rev() {
            for i in j + 1..n {
                let l = self.lu[(i, j)];
                if l == ZERO {
                    continue;
                }
                let (left, right) = x.as_mut_slice().split_at_mut(i * r);
                let dst = &mut left[j * r..(j + 1) * r];
                for (d, &s) in dst.iter_mut().zip(&right[..r]) {
                    *d -= s * l;
                }
            }
        }
        let mut out = ComplexMatrix::zeros(r, n);
        for (i, &p) in self.perm.iter().enumerate() {
            out.col_mut(p).copy_from_slice(x.col(i));
        }
        Ok(out)
    }
}
