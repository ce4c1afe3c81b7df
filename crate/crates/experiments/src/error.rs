use thiserror::Error;

/// Failures of an experiment run, grouped by CLI exit code.
#[derive(Debug, Error)]
pub enum ExpError {
    #[error("config error: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl ExpError {
    pub fn config(msg: impl Into<String>) -> Self {
        ExpError::Config(msg.into())
    }

    /// `2` config error, `3` precondition violation, `4` numerical failure,
    /// `1` for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            ExpError::Config(_) => 2,
            ExpError::Precondition(_) => 3,
            ExpError::Numerical(_) => 4,
            ExpError::Io(_) | ExpError::Csv(_) => 1,
        }
    }
}

impl From<vqoc_core::Error> for ExpError {
    fn from(e: vqoc_core::Error) -> Self {
        use vqoc_core::Error as E;
        match e {
            E::NonFinite(_) | E::NotPositiveSemidefinite(_) | E::NotNormalized(_) => {
                ExpError::Numerical(e.to_string())
            }
            _ => ExpError::Precondition(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, ExpError>;
