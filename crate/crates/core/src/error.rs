use thiserror::Error;

use crate::geometry::ReducedWord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("invalid letter {0:?}; expected one of a, A, b, B")]
    BadLetter(char),
    #[error("step {index} backtracks over the previous step")]
    Backtrack { index: usize },
    #[error("vertex set is not a path in the tree")]
    NotAPath,
    #[error("path must have at least one vertex")]
    EmptyPath,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubgroupError {
    #[error("length for index {index} is zero")]
    ZeroLength { index: u32 },
    #[error("generator index must be positive")]
    ZeroIndex,
    #[error("lengths must strictly increase with the index (index {index} has {length}, previous {previous})")]
    NotIncreasing { index: u32, length: u32, previous: u32 },
    #[error("no length given for index {index}")]
    MissingLength { index: u32 },
    #[error("membership search needs more than {max_syllables} syllables")]
    BoundExceeded { max_syllables: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("configuration domain does not cover radius {radius} around {vertex}")]
    InsufficientDomain { vertex: ReducedWord, radius: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("rule violation: {0}")]
    RuleViolation(String),
    #[error("malformed component: {0}")]
    MalformedComponent(String),
    #[error("configuration: {0}")]
    BadConfiguration(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("path length {0} is too short for this case")]
    TooShort(usize),
    #[error("length {0} is not admissible: Q has no eigenvalue 4")]
    NotAdmissible(usize),
    #[error("label {0} is not a finite class")]
    NotFinite(String),
    #[error("rule graph does not match the quotient model: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CylinderError {
    #[error("assignment must have a finite domain")]
    InfiniteDomain,
    #[error("vertex {0} lies outside the envelope")]
    OutsideEnvelope(ReducedWord),
    #[error("set is not connected")]
    Disconnected,
    #[error("target does not contain the assigned domain")]
    TargetTooSmall,
    #[error("assignment admits no extension: {0}")]
    Inconsistent(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0} coordinates is too many for exhaustive enumeration")]
    TooLarge(usize),
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("tail series diverges for radius {rho}")]
    Divergent { rho: u32 },
    #[error("subsets must be strictly increasing in lexicographic order")]
    NotIncreasing,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
    #[error(transparent)]
    Cylinder(#[from] CylinderError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("invalid value for {key}: {message}")]
    InvalidValue { key: String, message: String },
}
