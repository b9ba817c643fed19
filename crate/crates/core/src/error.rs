use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value failed validation. `field` is a dotted path into the
    /// configuration or the name of the offending argument.
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("no value for scenario {0}")]
    MissingScenario(u32),

    #[error("no value for VTG level {0}")]
    MissingVtgLevel(f64),

    #[error("missing cell for option {option}, criterion '{criterion}'")]
    MissingCell { option: u32, criterion: String },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("nothing to rank")]
    EmptyRanking,

    #[error("pipeline stage '{stage}' failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Des(#[from] simcda_des::DesError),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by bad input rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Validation { .. }
            | Error::Parse(_)
            | Error::MissingScenario(_)
            | Error::MissingVtgLevel(_)
            | Error::MissingCell { .. }
            | Error::EmptyRanking => true,
            Error::Stage { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
