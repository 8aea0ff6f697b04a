use thiserror::Error;

/// Errors raised by samplers, models, validators and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid start: log density is -inf at the initial state")]
    InvalidStart,

    #[error("insufficient data: need at least {needed} draws, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("size error: {0}")]
    Size(String),

    #[error(
        "config error{at}, key `{key}`: {message}",
        at = if *line > 0 { format!(" at line {line}") } else { String::new() }
    )]
    Config {
        key: String,
        line: usize,
        message: String,
    },

    #[error("unsupported combination: model `{model}` has no `{sampler}` sampler")]
    Unsupported { model: String, sampler: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit status: 1 for configuration problems, 2 for failures at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Unsupported { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
