use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbdError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: relation `{relation}` has arity {arity} but {given} arguments were given")]
    ArityMismatch {
        line: usize,
        relation: String,
        arity: usize,
        given: usize,
    },

    #[error("line {line}: tuple `{tuple}` of relation `{relation}` does not have length {arity}")]
    TupleLength {
        line: usize,
        relation: String,
        tuple: String,
        arity: usize,
    },

    #[error("line {line}: unknown relation `{relation}`")]
    UnknownRelation { line: usize, relation: String },

    #[error("relation `{0}` is defined twice with different tuples")]
    DuplicateRelation(String),

    #[error("invalid relation `{name}`: {reason}")]
    InvalidRelation { name: String, reason: String },

    #[error("variable `{0}` is not assigned")]
    UnassignedVariable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no lookup entry for relation `{0}`")]
    MissingLookup(String),

    #[error("the plain variant is not meaningful for the parameter |E|")]
    NotMeaningful,

    #[error("the size bound s is required for the {0} variant")]
    MissingSize(&'static str),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("unknown engine `{0}`")]
    UnknownEngine(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, AbdError>;
