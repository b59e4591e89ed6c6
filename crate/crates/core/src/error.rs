use thiserror::Error;

/// Errors raised by the network, analysis, model and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid number `{0}`")]
    InvalidNumber(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("term `{term}` of d{species}/dt has a negative coefficient but does not contain {species}")]
    Inadmissible { species: String, term: String },

    #[error("concentrations must be strictly positive (entry {0})")]
    NonPositiveState(usize),

    #[error("monomial of complex {0} has a non-integer exponent and cannot be evaluated exactly")]
    NonIntegerExponent(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("complex {0} is already part of the network")]
    DuplicateComplex(String),

    #[error("model: {0}")]
    Model(String),

    #[error("solution: {0}")]
    Solution(String),

    #[error("constraint `{name}` violated by {violation}")]
    ConstraintViolated { name: String, violation: String },

    #[error("solver: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
