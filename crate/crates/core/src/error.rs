use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree {degree} outside complex range {lo}..={hi}")]
    DegreeOutOfRange { degree: i64, lo: i64, hi: i64 },
    #[error("boundary of boundary is nonzero at degree {0}")]
    NotAComplex(i64),
    #[error("input chain is not a cycle")]
    NotACycle,
    #[error("cycle is not a boundary in degree {0}")]
    NotABoundary(i64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("modulus 0 is not a valid cyclic coefficient group (use Z)")]
    ZeroModulus,
    #[error("points are affinely dependent: {0}")]
    AffineDegeneracy(String),
    #[error("orderings are incompatible on face {0:?}")]
    IncompatibleOrdering(Vec<usize>),
    #[error("space is not T0; indistinguishable pairs {0:?}")]
    NotT0(Vec<(String, String)>),
    #[error("set is not open: {0}")]
    NotOpen(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("presheaf is not functorial: {0}")]
    NotFunctorial(String),
    #[error("region containment undecidable: {0}")]
    Undecidable(String),
    #[error("invalid nesting construction: {0}")]
    InvalidNesting(String),
    #[error("unsupported map: {0}")]
    UnsupportedMap(String),
    #[error("covering invalid: {0}")]
    InvalidCovering(String),
    #[error("no filler found for cycle: {0}")]
    FillerFailure(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}
