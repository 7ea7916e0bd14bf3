use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed spec file or invalid flags.
    #[error("invalid input: {0}")]
    Schema(String),

    #[error(transparent)]
    Model(enttime::Error),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Schema(_) => 2,
            Self::Model(_) => 3,
            Self::Numeric(_) => 4,
        }
    }
}

impl From<enttime::Error> for CliError {
    fn from(e: enttime::Error) -> Self {
        use enttime::Error as E;
        match e {
            E::Numerical(_) | E::Domain(_) => Self::Numeric(e.to_string()),
            _ => Self::Model(e),
        }
    }
}
