use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid pair data: {0}")]
    InvalidPair(String),
    #[error("interpolation needs at least one point")]
    EmptyInterpolation,
    #[error("duplicate interpolation abscissa {0}")]
    DuplicateAbscissa(String),
    #[error("dimension {0} is too small for this operation (need n >= 2)")]
    DimensionTooSmall(u32),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("divisor multiplicity m = {0} is unsupported here (only D in |L|, m = 1)")]
    MultiplicityUnsupported(u32),
    #[error("missing alpha data: {0}")]
    MissingAlphaData(String),
    #[error("missing positivity data: {0}")]
    MissingPositivityData(String),
    #[error("inconsistent positivity data: {0}")]
    InconsistentPositivity(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("beta = {beta} is not below the instability threshold {threshold}; DF > 0 for every c in (0,1)")]
    NotBelowThreshold { beta: String, threshold: String },
    #[error("destabilizer search exhausted: {0}")]
    SearchExhausted(String),
    #[error("inconsistent assertions: {0}")]
    InconsistentAssertions(String),
    #[error("c*k is not an integer (c = {c}, k = {k})")]
    NonIntegralCK { c: String, k: u64 },
    #[error("below the Hilbert model validity floor: {0}")]
    BelowValidityFloor(String),
    #[error("Hilbert model produced a non-integral dimension {0}")]
    NonIntegralDimension(String),
    #[error("held-out sample disagrees with the interpolant: {0}")]
    DegreeMismatch(String),
    #[error("Hilbert model does not match the pair: {0}")]
    ModelMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
