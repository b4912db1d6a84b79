use std::path::PathBuf;

/// Errors raised by the library. Variants map onto the CLI exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} exceeds the supported limit {limit}")]
    SizeLimit {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("point outside the admissible domain: {0}")]
    Domain(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("symbol parse error at monomial {index}: {message}")]
    Parse { index: usize, message: String },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quadrature too coarse: {0}")]
    QuadratureInadequate(String),

    #[error("{method} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("numerical contract violated: {0}")]
    ContractViolation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the `qmf` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 4,
            Error::ContractViolation(_)
            | Error::NonConvergence { .. }
            | Error::NotHermitian { .. }
            | Error::QuadratureInadequate(_)
            | Error::DimensionMismatch { .. } => 3,
            Error::InvalidArgument(_)
            | Error::SizeLimit { .. }
            | Error::Domain(_)
            | Error::InvalidDistribution(_)
            | Error::Parse { .. }
            | Error::Config(_) => 2,
        }
    }
}
