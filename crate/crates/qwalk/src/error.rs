use thiserror::Error;

/// Errors produced by the walk library and CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(
        "grid too narrow: boundary amplitude {boundary:.3e} exceeds 1e-8 of peak {peak:.3e}; \
         widen the spatial window"
    )]
    GridTooNarrow { boundary: f64, peak: f64 },
    #[error("step length {step} is not an integer multiple of the lattice spacing {spacing}")]
    IncompatibleSpacing { step: f64, spacing: f64 },
    #[error("branch enumeration supports t <= {max}, got t = {got}")]
    EnumerationTooLarge { got: u64, max: u64 },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
