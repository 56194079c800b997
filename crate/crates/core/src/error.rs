use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds tolerance)")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix has eigenvalue {value:.3e} below the clamping tolerance")]
    NegativeEigenvalue { value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("transmission has singular value {max_singular:.6} > 1; not a lossy device")]
    GainNotLoss { max_singular: f64 },

    #[error("transmission has singular value {min_singular:.6} < 1; not an amplifying device")]
    LossNotGain { min_singular: f64 },

    #[error("device constraint violated (residual {residual:.3e})")]
    ConstraintViolated { residual: f64 },

    #[error("negative thermal occupation {0}")]
    NegativeOccupation(f64),

    #[error("inadmissible state: {0}")]
    InadmissibleState(String),

    #[error("empty phase-space window")]
    EmptyWindow,

    #[error("gain {0} is below unity")]
    SubunityGain(f64),

    #[error("argument outside the function domain: {0}")]
    DomainError(String),

    #[error("profile sampling is not closed under x -> -x (no partner for x = {0})")]
    AsymmetricSampling(f64),

    #[error("Fock truncation leaked {leak:.3e} of probability (bound {bound:.1e}); raise the dimension")]
    TruncationOverflow { leak: f64, bound: f64 },

    #[error("unsupported by the Fock oracle: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
