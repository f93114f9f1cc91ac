use thiserror::Error;

/// Errors raised by the library. Each variant maps to a violated precondition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("basis is singular")]
    SingularBasis,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("polynomial is not monic")]
    NonMonic,
    #[error("expansion base must have degree at least 1")]
    ConstantBase,
    #[error("element has nonzero valuation {0}")]
    NotAUnit(i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements live at different tower levels ({0} and {1})")]
    LevelMismatch(usize, usize),
    #[error("polynomial is reducible, factor {0}")]
    Reducible(String),
    #[error("element does not lie in level {0}")]
    NotInSublevel(usize),
    #[error("cloud has no finite point")]
    EmptyCloud,
    #[error("not a key polynomial: {0}")]
    NotKey(String),
    #[error("augmentation value must exceed {0}")]
    NotStrict(String),
    #[error("MacLane condition violated; refine the top level instead")]
    MacLaneViolation,
    #[error("value {0} lies outside the attainable group")]
    OutsideSpan(String),
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("refinement key is not equivalent to the current top key")]
    NotEquivalent,
    #[error("chain is not optimal")]
    NonOptimal,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("twist exponent {0} is not an integer")]
    FractionalExponent(String),
    #[error("input not squarefree")]
    NotSquarefree,
    #[error("coefficient {0} is not integral at p")]
    NonIntegral(String),
    #[error("depth limit {0} exceeded")]
    DepthExceeded(usize),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// Short machine-readable tag used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(..) => "dimension_mismatch",
            Error::SingularBasis => "singular_basis",
            Error::NotPrime(_) => "not_prime",
            Error::NonMonic => "non_monic",
            Error::ConstantBase => "constant_base",
            Error::NotAUnit(_) => "not_a_unit",
            Error::DivisionByZero => "division_by_zero",
            Error::LevelMismatch(..) => "level_mismatch",
            Error::Reducible(_) => "reducible",
            Error::NotInSublevel(_) => "not_in_sublevel",
            Error::EmptyCloud => "empty_cloud",
            Error::NotKey(_) => "not_key",
            Error::NotStrict(_) => "not_strict",
            Error::MacLaneViolation => "maclane_violation",
            Error::OutsideSpan(_) => "outside_span",
            Error::DegreeMismatch { .. } => "degree_mismatch",
            Error::NotEquivalent => "not_equivalent",
            Error::NonOptimal => "non_optimal",
            Error::ZeroPolynomial => "zero_polynomial",
            Error::FractionalExponent(_) => "fractional_exponent",
            Error::NotSquarefree => "not_squarefree",
            Error::NonIntegral(_) => "non_integral",
            Error::DepthExceeded(_) => "depth_exceeded",
            Error::Parse { .. } => "parse",
            Error::Invalid(_) => "invalid",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
