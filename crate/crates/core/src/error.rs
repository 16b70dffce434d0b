use thiserror::Error;

/// Every failure the pipeline can report, from scalar arithmetic up to the
/// cross-ratio consistency checks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid p-adic context: {0}")]
    InvalidContext(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("not a square in Q_p: {0}")]
    NonSquare(String),
    #[error("quadratic does not split over Q_p: {0}")]
    NonSplit(String),
    #[error("degenerate ball: {0}")]
    DegenerateBall(String),
    #[error("parse error: {0}")]
    Parse(String),

    #[error("fixed points coincide")]
    CoincidentFixedPoints,
    #[error("expected {expected} balls, got {got}")]
    BallCountMismatch { expected: usize, got: usize },

    #[error("pole hit: {0}")]
    PoleHit(String),
    #[error("tail bound {achieved} below requested tolerance {requested}; try word length {suggested_len}")]
    TailBoundNotMet {
        achieved: i64,
        requested: i64,
        suggested_len: usize,
    },
    #[error("valuation matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("diagonal entry {index} does not square to the period")]
    DiagMismatch { index: usize },
    #[error("theta series diverges: {0}")]
    Divergent(String),

    #[error("closed form and truncated product disagree: {0}")]
    Mismatch(String),
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("label {0} already in the subset")]
    LabelCollision(usize),

    #[error("theta quotient denominator vanishes: {0}")]
    ZeroDenominator(String),
    #[error("derivations disagree: {0}")]
    InconsistentDerivations(String),

    #[error("invalid curve input: {0}")]
    Spec(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
