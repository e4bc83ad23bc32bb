use thiserror::Error;

/// Errors raised by constructors and operations across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("measure space must contain at least one point")]
    EmptySpace,
    #[error("weight of point {index} is {weight}; weights must be finite and strictly positive")]
    InvalidWeight { index: usize, weight: f64 },
    #[error("field value at point {index} is not finite ({value})")]
    NonFiniteValue { index: usize, value: f64 },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("operands live on different measure spaces")]
    SpaceMismatch,
    #[error("exponent p = {0} is below 1")]
    InvalidExponent(f64),
    #[error("set is empty")]
    EmptySet,
    #[error("ball {0} has zero measure")]
    DegenerateBall(usize),

    #[error("dyadic depth {0} exceeds the supported maximum of {max}", max = crate::basis::MAX_DYADIC_LEVELS)]
    LevelsTooLarge(u32),
    #[error("grid dimension {0} is not supported (expected 1 or 2)")]
    InvalidDimension(usize),
    #[error("grid needs at least 4 points per axis, got {0}")]
    GridTooSmall(usize),
    #[error("partition level {level} does not refine level {parent}")]
    NonNestedPartition { level: usize, parent: usize },
    #[error("finest partition level must consist of singletons")]
    LeavesNotSingletons,
    #[error("hull map length {got} does not match {expected} balls")]
    HullLength { expected: usize, got: usize },
    #[error("ball id {0} out of range")]
    UnknownBall(usize),
    #[error("cover leaves point {0} uncovered")]
    CoverDoesNotCover(usize),
    #[error("basis violates the hull axiom: ball {inner} meets ball {ball} but is not inside its hull")]
    HullAxiomViolated { ball: usize, inner: usize },
    #[error("operation requires a {0} basis")]
    WrongBasis(&'static str),

    #[error("kernel profile is not non-increasing at radius {0}")]
    ProfileNotMonotone(f64),
    #[error("kernel profile must be nonnegative and finite")]
    ProfileInvalid,
    #[error("log-weighted integral of the kernel profile diverges at grid scale")]
    DivergentProfile,
    #[error("weight sequence must start with a positive term")]
    InvalidWeightSequence,
    #[error("Fejér degree {degree} is incompatible with a grid of {n} points")]
    DegreeIncompatible { degree: usize, n: usize },
    #[error("ball {0} has no kernel")]
    MissingKernel(usize),
    #[error("kernel preset `{0}` not recognised")]
    UnknownPreset(String),

    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("this norm requires an alpha parameter")]
    MissingAlpha,
    #[error("basis is not regular (measured theta is zero)")]
    NotRegular,

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
