use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("symbol {0} is not in the alphabet")]
    ForeignSymbol(usize),
    #[error("duplicate element at position {0}")]
    Duplicate(usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("conditioning on a null event")]
    NullConditioning,
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("parameter check {name} failed: {lhs} > {rhs}")]
    Params { name: &'static str, lhs: String, rhs: String },
    #[error("process is not {eta}-stationary: modulus is {eta_star}")]
    NotStationary { eta: String, eta_star: String },
    #[error("inequality {name} failed: {lhs} {relation} {rhs}")]
    Inequality { name: String, lhs: String, relation: String, rhs: String },
    #[error("tuple is not {ell}-separated: element {j} has no separating window")]
    NotSeparated { ell: usize, j: usize },
    #[error("mixed classification at the branch point")]
    Mixed,
    #[error("no realization: {0}")]
    NoRealization(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Error {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Error {
        Error::Io(e.to_string())
    }
}
