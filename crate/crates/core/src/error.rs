use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("parent group mismatch: {0}")]
    ParentMismatch(String),
    #[error("group order {order} exceeds the enumeration limit {limit}")]
    LimitExceeded { order: u64, limit: u64 },
    #[error("invalid homomorphism: {0}")]
    InvalidHom(String),
    #[error("invalid bicharacter: {0}")]
    InvalidBicharacter(String),
    #[error("degenerate bicharacter: radical has order {radical_order}")]
    Degenerate { radical_order: u64 },
    #[error("invalid reduction operation: {0}")]
    InvalidOp(String),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error("map is not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("subgroup {0} is not isotropic")]
    NotIsotropic(String),
    #[error("subgroup {0} is not maximal isotropic")]
    NotMaximalIsotropic(String),
    #[error("invalid character extension: {0}")]
    InvalidCharacter(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("averaged operator vanished after {attempts} attempts")]
    ZeroProjection { attempts: usize },
    #[error("intertwiner solution space has dimension {0}, expected 1")]
    SolutionSpaceNotOneDimensional(usize),
    #[error("label {0} is outside the subgroup")]
    LabelOutsideSubgroup(String),
    #[error("incompatible representations: {0}")]
    IncompatibleReps(String),
}

pub type Result<T> = std::result::Result<T, Error>;
