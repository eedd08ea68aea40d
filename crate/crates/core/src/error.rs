use thiserror::Error;

use crate::numkit::NumError;

/// Errors raised by the physical models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate point x = z = 0 has no gap")]
    Degenerate,
    #[error(transparent)]
    Numerical(#[from] NumError),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
