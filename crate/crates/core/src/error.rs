use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum SefError {
    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid mask: {0}")]
    InvalidMask(String),

    #[error("invalid labels: {0}")]
    InvalidLabels(String),

    #[error("no decision model for class pair ({0}, {1})")]
    MissingModel(usize, usize),

    #[error("degenerate kernel: eigenvalue {value:e} of component {index} is not positive")]
    DegenerateKernel { index: usize, value: f64 },

    #[error("neighbourhood graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SefError>;

pub(crate) fn ensure_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(SefError::DimensionMismatch { expected, found })
    }
}

pub(crate) fn ensure_finite(values: impl IntoIterator<Item = f64>, what: &str) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(SefError::InvalidData(format!("{what} contains non-finite values")))
    }
}
