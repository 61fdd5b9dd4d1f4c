use thiserror::Error;

/// Errors raised by field construction, geometry, group and search routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("field of order {p}^{degree} exceeds the supported size")]
    FieldTooLarge { p: u64, degree: u32 },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("degree {sub} does not divide {ambient}")]
    DegreeMismatch { sub: u32, ambient: u32 },

    #[error("element is not in the subfield of degree {0}")]
    NotInSubfield(u32),

    #[error("no root in the field: {0}")]
    NoRoot(String),

    #[error("point is not singular")]
    NonSingularPoint,

    #[error("point is singular")]
    SingularPoint,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
