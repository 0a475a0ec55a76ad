use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown proposition symbol `{name}` at byte {pos}")]
    UnknownSymbol { name: String, pos: usize },

    #[error("literal at byte {pos} is not in the scope of a modal operator")]
    BareLiteral { pos: usize },

    #[error("negation at byte {pos} is not applied to a proposition symbol")]
    NotNnf { pos: usize },

    #[error("grade {grade} at byte {pos} exceeds the configured maximum {max}")]
    GradeTooLarge { grade: u64, max: u64, pos: usize },

    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    #[error("vocabulary mismatch: {0}")]
    VocabularyMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("scale cap exceeded: {0}")]
    ScaleCap(String),

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
