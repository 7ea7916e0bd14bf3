use thiserror::Error;

/// Errors raised by the numerical kernel and the model builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("operator is not Hermitian: worst residual {residual:.3e} at ({row}, {col})")]
    NotHermitian { residual: f64, row: usize, col: usize },

    #[error("state error: {0}")]
    State(String),

    #[error("model error: {0}")]
    Model(String),

    #[error(
        "field truncation too small: tail mass {tail:.3e} above n_max = {n_max}; \
         use n_max >= {required_n_max}"
    )]
    Truncation { n_max: usize, tail: f64, required_n_max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
