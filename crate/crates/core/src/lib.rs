pub mod conditioning;
pub mod engine;
pub mod error;
pub mod functions;
pub mod gallery;
pub mod linalg;
pub mod matfun;
pub mod mtx;
pub mod quadrature;
pub mod reference;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64;
