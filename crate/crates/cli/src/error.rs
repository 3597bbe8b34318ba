use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or command-line usage; exit code 1.
    #[error("config error: {0}")]
    Config(String),

    /// A computation failed on valid input, or output could not be written;
    /// exit code 2.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Numeric(_) => 2,
        }
    }
}

impl From<mlpwm::Error> for CliError {
    fn from(e: mlpwm::Error) -> Self {
        match e {
            mlpwm::Error::InvalidParameter { .. } | mlpwm::Error::InvalidLoad => Self::Config(e.to_string()),
            mlpwm::Error::NumericFailure(_) | mlpwm::Error::UndefinedThd => Self::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Numeric(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Numeric(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Numeric(format!("json: {e}"))
    }
}
