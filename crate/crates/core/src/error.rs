use thiserror::Error;

/// Errors produced by model construction and the numeric routines.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("index {index} out of range in {context}")]
    IndexOutOfRange { index: usize, context: &'static str },

    #[error("spectral radius {radius} of the modified transition matrix is not strictly below 1")]
    SpectralRadiusViolation { radius: f64 },

    #[error("linear system solve failed: {0}")]
    SingularSystem(String),

    #[error("random walk exceeded {0} steps; the model violates the spectral assumption")]
    NonTermination(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;
