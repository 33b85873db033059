//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by the privacy-aware GP library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input contained non-finite values or violated a basic precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Shapes of the operands do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A Cholesky pivot was non-positive; the matrix is not positive definite.
    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// A matrix required to be positive semidefinite has a significantly
    /// negative eigenvalue.
    #[error("matrix not positive semidefinite: {0}")]
    NotPsd(String),

    /// An iterative scheme exhausted its iteration budget.
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    /// Privacy tolerance outside the admissible open interval `(0, K(s,s))`.
    #[error("invalid privacy tolerance: {0}")]
    InvalidTolerance(String),

    /// Target matrix `Ξ` is not PSD or `K_{S,S} − Ξ` is not positive definite.
    #[error("invalid privacy target matrix: {0}")]
    InvalidXi(String),

    /// The kernel pair `(K, H)` failed validation.
    #[error("invalid kernel pair: {0}")]
    InvalidKernelPair(String),

    /// The RKHS inner-product integral diverges for this kernel pair.
    #[error("inner-product integral diverges: {0}")]
    NotIntegrable(String),

    /// Operation is not available for this kernel family.
    #[error("unsupported kernel family: {0}")]
    UnsupportedFamily(String),

    /// A released-model file declares an unknown format version.
    #[error("format version mismatch: found {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    /// The released-model checksum does not match its payload.
    #[error("artifact checksum mismatch")]
    ChecksumMismatch,

    /// A released model violates its own privacy floor.
    #[error("released model failed privacy verification: {0}")]
    VerificationFailed(String),

    /// A pipeline stage failed; wraps the underlying error.
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Wrap an error with the pipeline stage in which it occurred.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NotPositiveDefinite(_) => "not_positive_definite",
            Error::NotPsd(_) => "not_psd",
            Error::NoConvergence(_) => "no_convergence",
            Error::InvalidTolerance(_) => "invalid_tolerance",
            Error::InvalidXi(_) => "invalid_xi",
            Error::InvalidKernelPair(_) => "invalid_kernel_pair",
            Error::NotIntegrable(_) => "not_integrable",
            Error::UnsupportedFamily(_) => "unsupported_family",
            Error::VersionMismatch { .. } => "version_mismatch",
            Error::ChecksumMismatch => "checksum_mismatch",
            Error::VerificationFailed(_) => "verification_failed",
            Error::Stage { source, .. } => source.kind(),
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
