use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("matrix is singular: pivot {pivot} has modulus {modulus:e} below threshold {threshold:e}")]
    SingularMatrix {
        pivot: usize,
        modulus: f64,
        threshold: f64,
    },

    #[error("resolvent at quadrature node {node} ({shift}) is numerically singular")]
    SingularResolvent { node: usize, shift: String },

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not Hermitian positive definite (smallest eigenvalue {lambda_min:e})")]
    NotHpd { lambda_min: f64 },

    #[error("smallest eigenvalue is not simple (relative gap {gap:e}); exact level-2 formula degrades to a lower bound {lower_bound:e}")]
    MultipleMinEigenvalue { gap: f64, lower_bound: f64 },

    #[error("function `{function}` is not supported by {operation}")]
    UnsupportedClass {
        function: &'static str,
        operation: &'static str,
    },

    #[error("spectrum violates the domain of `{function}`: {detail}")]
    DomainViolation {
        function: &'static str,
        detail: String,
    },

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("quadrature rule `{rule}` cannot be used with function `{function}`")]
    IncompatibleRule {
        rule: &'static str,
        function: &'static str,
    },

    #[error("derivative order {k} outside the supported range 1..={max}")]
    OrderTooLarge { k: usize, max: usize },

    #[error("size {size} exceeds the configured cap {cap}")]
    SizeCapExceeded { size: usize, cap: usize },

    #[error("complex-step method requires real A and directions")]
    ComplexInputRejected,

    #[error("matrix norm {norm:e} too large to scale")]
    Overflow { norm: f64 },

    #[error("invalid parameters: {0}")]
    BadParams(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported Matrix Market field `{0}`")]
    UnsupportedField(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures caused by the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularMatrix { .. }
                | Error::SingularResolvent { .. }
                | Error::NonConvergence { .. }
                | Error::Overflow { .. }
                | Error::MultipleMinEigenvalue { .. }
                | Error::NotHpd { .. }
                | Error::DomainViolation { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
