use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FaddeevError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("momentum is not on the energy variety: {0}")]
    OffVariety(String),

    #[error("quadrature did not converge: estimate {estimate}, error {error:e} after {subdivisions} subdivisions")]
    Quadrature {
        estimate: String,
        error: f64,
        subdivisions: usize,
    },

    #[error(
        "spectral singularity: |det A| = {det_abs:e} below threshold {threshold:e} (condition estimate {condition:e})"
    )]
    SpectralSingularity {
        det_abs: f64,
        threshold: f64,
        condition: f64,
    },

    #[error("renormalization pole: coupling {alpha} diverges at cutoff N = {pole}")]
    RenormalizationPole { alpha: f64, pole: f64 },

    #[error("singular linear system")]
    SingularSystem,

    #[error("no sign change bracketed: {0}")]
    NoBracket(String),

    #[error("construction impossible: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, FaddeevError>;
