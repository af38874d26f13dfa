//! Dense complex linear algebra.

pub mod banded;
pub mod eigen;
pub mod lu;
pub mod matrix;
pub mod norms;

pub use banded::{prefer_banded, BandedLu, ShiftedSolver};
pub use eigen::{
    check_hermitian, extreme_eigenvalues_hermitian, extreme_eigenvalues_hermitian_with, hermitian_eigenvalues, two_smallest_hpd,
    JACOBI_MAX_DIM,
};
pub use lu::{lu_factor, lu_factor_with, LuFactors, LuOptions, SolveMode, UNIT_ROUNDOFF};
pub use matrix::{dot_conj, rel_error, vec_norm, ComplexMatrix, ONE, ZERO};
pub use norms::{dominant_hermitian, frobenius_norm, spectral_norm, spectral_norm_with, PowerOptions};
