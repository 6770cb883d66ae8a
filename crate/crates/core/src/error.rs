use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid architecture, hyperparameters or model document.
    #[error("configuration error: {0}")]
    Config(String),

    /// A loss or gradient evaluation produced NaN or infinity.
    #[error("non-finite loss at sample {index}")]
    NonFiniteLoss { index: usize },

    #[error("non-finite gradient entry {index}")]
    NonFiniteGradient { index: usize },

    /// Training diverged; `step` is the 0-based optimizer iteration.
    #[error("training diverged at step {step}: {source}")]
    Divergence {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("SOR did not converge after {sweeps} sweeps (last max update {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("grid size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
