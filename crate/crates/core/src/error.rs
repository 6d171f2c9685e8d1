use thiserror::Error;

/// Structural and parse errors shared across the crate.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("domain error: {0}")]
    Domain(String),
}

impl CoreError {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        CoreError::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
