use thiserror::Error;

/// Errors raised by the numeric modules. Real-valued payloads are widened to
/// `f64` so the error type does not depend on the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SalemError {
    #[error("a digit system needs at least two digits, got q = {q}")]
    TooFewDigits { q: usize },

    #[error("expected {expected} entries, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("weight p[{index}] = {value} is outside the open interval (0, 1)")]
    WeightOutOfRange { index: usize, value: f64 },

    #[error("weights sum to {sum}, which differs from 1 by more than the allowed tolerance")]
    WeightSumMismatch { sum: f64 },

    #[error("digit map {map:?} is not a bijection of 0..{q}")]
    NotAPermutation { map: Vec<usize>, q: usize },

    #[error("argument {value} is outside the domain [0, 1]")]
    ArgumentOutOfDomain { value: f64 },

    #[error("digit {digit} is not valid for a system with q = {q}")]
    DigitOutOfRange { digit: usize, q: usize },

    #[error("period of a digit string must be nonempty")]
    EmptyPeriod,

    #[error("cylinder base must contain at least one digit")]
    EmptyCylinder,

    #[error("depth must be at least 1")]
    ZeroDepth,

    #[error("expected a rational point with a finite expansion and zero tail")]
    NotRational,

    #[error("the endpoints 0 and 1 have one-sided neighbourhoods only")]
    EndpointExcluded,

    #[error("rank {rank} with q = {q} exceeds the enumeration limit of {limit} cylinders")]
    RankTooLarge { rank: usize, q: usize, limit: usize },

    #[error("depth {depth} with q = {q} exceeds the limit of {limit} generated points")]
    DepthTooLarge {
        depth: usize,
        q: usize,
        limit: usize,
    },

    #[error("digit set must not be empty")]
    EmptyDigitSet,

    #[error("box counting needs at least {required} points, got {found}")]
    InsufficientPoints { required: usize, found: usize },

    #[error("box counting needs at least {required} grid levels, got {found}")]
    TooFewLevels { required: usize, found: usize },

    #[error("grid sizes must be strictly decreasing powers of 1/2: {reason}")]
    InvalidLevels { reason: String },

    #[error("rank must be at least 1")]
    ZeroRank,

    #[error("shift index must be at least 1")]
    ZeroShift,
}

pub type Result<T, E = SalemError> = std::result::Result<T, E>;
