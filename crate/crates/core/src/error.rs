use thiserror::Error;

use crate::matroid::TuWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("duplicate element `{0}`")]
    DuplicateElement(String),

    #[error("ground set has {found} elements, the supported maximum is {max}")]
    TooManyElements { found: usize, max: usize },

    #[error("expected {expected} coordinates, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("chain is not simple: coefficient {0} outside {{-1, 0, 1}}")]
    NotSimple(i64),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("matrix has no rows")]
    EmptyMatrix,

    #[error("matrix is not totally unimodular: {0}")]
    NotTotallyUnimodular(TuWitness),

    #[error("element `{0}` is a loop")]
    IsLoop(String),

    #[error("element `{0}` is a coloop")]
    IsColoop(String),

    #[error("`{0}` is not a basis")]
    NotABasis(String),

    #[error("element `{element}` is on the wrong side of the basis ({expected})")]
    WrongSide { element: String, expected: &'static str },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("chain does not lie in the {0}")]
    NotInSpace(&'static str),

    #[error("budget exceeded for {what}: needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("time budget exhausted")]
    TimeBudget,

    #[error("signature is not triangulating: {0}")]
    NotTriangulating(String),

    #[error("not a plane embedding: {0}")]
    NotPlanarEmbedding(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("orientation {0} is not (sigma, sigma*)-compatible")]
    NotCompatibleOrientation(String),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("BBY map is not a bijection onto the compatible orientations: {0}")]
    NotABijection(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error reports an exhausted budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::TimeBudget)
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
