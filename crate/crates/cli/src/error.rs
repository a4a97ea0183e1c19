use thiserror::Error;

#[derive(Error, Debug)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] dirac_shell::Error),

    #[error("{failed} of {total} computations failed; partial output written")]
    Solver { failed: usize, total: usize },

    #[error("{failed} of {total} checks failed")]
    Verify { failed: usize, total: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1: a verification check failed, 2: invalid input, 3: solver or i/o failure.
    pub fn exit_code(&self) -> u8 {
        use dirac_shell::Error as E;
        match self {
            CliError::Verify { .. } => 1,
            CliError::Invalid(_) => 2,
            CliError::Core(E::Domain(_) | E::NotCritical { .. } | E::FormFactor(_)) => 2,
            CliError::Csv(_) => 2,
            _ => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
