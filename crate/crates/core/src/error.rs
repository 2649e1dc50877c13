use thiserror::Error;

/// Errors raised by library operations.
///
/// Structural problems found while *validating* a groupoid, semigroup or
/// representation are returned as data (lists of violations), not as
/// errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arrows {left} and {right} are not composable")]
    NotComposable { left: String, right: String },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("not a slice: {0}")]
    NotASlice(String),
    #[error("closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("elements live on different groupoids")]
    GroupoidMismatch,
    #[error("measure is not quasi-invariant (witness arrow {arrow})")]
    NotQuasiInvariant { arrow: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("exponent mismatch: {0} vs {1}")]
    ExponentMismatch(f64, f64),
    #[error("invalid exponent {0}: must lie in (1, inf)")]
    InvalidExponent(f64),
    #[error("second argument of the semi-inner product is zero")]
    ZeroSecondArgument,
    #[error("operator is not spatial: {0}")]
    NotSpatial(String),
    #[error("operator is not an isometry on its support: {0}")]
    NotAnIsometryOnSupport(String),
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("semilattice has {size} elements, cap is {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("image of idempotent {element} is not a hermitian idempotent")]
    NotHermitianIdempotent { element: String },
    #[error("representation is not tight: {0}")]
    NotTight(String),
    #[error("slices disagree on arrow {arrow} (difference {difference:e})")]
    InconsistentSlices { arrow: String, difference: f64 },
    #[error("fibration failure at index {index}: {reason}")]
    FibrationFailure { index: usize, reason: String },
    #[error("word of length {length} does not fit in truncation budget {budget}")]
    BudgetTooSmall { length: usize, budget: usize },
    #[error("Cuntz relations violated: {0}")]
    RelationsViolated(String),
    #[error("level {level} out of range (diagram has {levels} levels)")]
    LevelOutOfRange { level: usize, levels: usize },
    #[error("tower element lives at level {found}, expected {expected}")]
    LevelMismatch { expected: usize, found: usize },
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
