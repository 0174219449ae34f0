use dualwell::error::Error;

/// Failure of a CLI run, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or invalid configuration, bad input files, unwritable output.
    #[error("configuration error: {0}")]
    Config(String),
    /// The load violates balance, the single interior zero or the L1 bound.
    #[error("load hypotheses violated: {0}")]
    Hypothesis(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Hypothesis(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn from_core(err: Error) -> Self {
        match err {
            Error::InvalidSpec(_) | Error::MalformedLoad(_) | Error::Domain(_) => CliError::Config(err.to_string()),
            Error::DegenerateLoad(_) => CliError::Hypothesis(err.to_string()),
            Error::NegativeAmplitude(_)
            | Error::AmplitudeOverflow { .. }
            | Error::GridMismatch(_)
            | Error::GapViolation { .. }
            | Error::Numerical(_) => CliError::Numerical(err.to_string()),
        }
    }

    pub fn io(what: &str, err: std::io::Error) -> Self {
        CliError::Config(format!("{what}: {err}"))
    }
}
