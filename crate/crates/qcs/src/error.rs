use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sign error: mixed-sign coefficients in {0}")]
    Sign(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("validation error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Validation { line: Option<usize>, msg: String },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation { line: None, msg: msg.into() }
    }

    pub fn validation_at(line: usize, msg: impl Into<String>) -> Self {
        Error::Validation { line: Some(line), msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
