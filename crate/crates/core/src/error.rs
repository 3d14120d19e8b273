use thiserror::Error;

/// Errors raised by the library. Report-valued operations (validation,
/// axiom checks, certificate checks) return diagnostics instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid number `{text}`: {reason}")]
    Number { text: String, reason: String },

    #[error("value {0} lies outside the unit interval")]
    OutOfRange(String),

    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("type error at {path}: {message}")]
    Type { path: String, message: String },

    #[error("lifting does not match functor: {0}")]
    Shape(String),

    #[error("unknown modality `{0}`")]
    UnknownModality(String),

    #[error("modality `{name}` expects {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("json error at {path}: {message}")]
    Json { path: String, message: String },

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn json(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Json {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
