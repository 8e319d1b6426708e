use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable {var} has an empty domain")]
    EmptyDomain { var: usize },

    #[error("value {value} is not in the domain of variable {var}")]
    ValueOutOfDomain { var: usize, value: i64 },

    #[error("variable {var} is unbound in an assignment that must be total")]
    PartialAssignment { var: usize },

    #[error("constraint scope ({0}, {1}) is invalid")]
    InvalidScope(usize, usize),

    #[error("more than one constraint on variable pair ({0}, {1})")]
    DuplicatePair(usize, usize),

    #[error("tuple ({x}, {y}) lies outside the scope domains of constraint {constraint}")]
    TupleOutOfDomain { constraint: usize, x: i64, y: i64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("statistics error: {0}")]
    Stats(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
