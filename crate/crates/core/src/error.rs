use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is not a member of the cone")]
    NotMember,

    #[error("intersection product needs {expected} classes, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("rank mismatch: expected rank {expected}, got {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("extremal ray length {0} is outside the taxonomy bounds 1..=3")]
    InvalidLength(i64),

    #[error("divisor is not big: facet {facet} evaluates to {value}")]
    NotBig { facet: usize, value: String },

    #[error("cone has no facet description")]
    EmptyCone,

    #[error("a = {0} is not positive; b is only defined for uniruled models")]
    NotUniruled(String),

    #[error("degree must be positive, got {0}")]
    NonpositiveDegree(String),

    #[error("a-value must be positive, got {0}")]
    NonpositiveA(String),

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("divisor is not pseudo-effective")]
    NotPseudoEffective,

    #[error("support Gram matrix is not negative definite")]
    NonNegativeDefinite,

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("embedded database record {name} is corrupt: {violations}")]
    CorruptData { name: String, violations: String },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersionMismatch { expected: u32, found: u32 },

    #[error("cannot classify {name}: class {class} is not covered by the numeric criteria and has no annotation")]
    InsufficientAnnotations { name: String, class: String },

    #[error("scan bound {0} is below the minimum 5")]
    InvalidScanBound(u32),

    #[error("unknown record {0}")]
    UnknownRecord(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
