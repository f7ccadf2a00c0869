use crate::numerics::Rat;
use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(BigInt),

    #[error("surds with different radicands ({0} and {1}) cannot be combined exactly")]
    MixedRadicand(BigInt, BigInt),

    /// An interval enclosure is too wide to decide a comparison.
    #[error("needs refinement: {0}")]
    NeedsRefinement(String),

    #[error("no entry of the direction is certifiably nonzero")]
    IndeterminateDirection,

    /// Continued-fraction expansion of a rational terminated; carries every convergent.
    #[error("rational input has a finite continued fraction with {} convergents", .0.len())]
    FiniteExpansion(Vec<(BigInt, BigInt)>),

    #[error("direction is rational; no squeezing certificate exists for rational directions")]
    RationalDirection,

    #[error("search exhausted after {steps} steps (best admissible radius {best_admissible_r:?})")]
    SearchExhausted {
        steps: usize,
        best_admissible_r: Option<Rat>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Stable kebab-case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::DivisionByZero => "division-by-zero",
            Error::NotUnimodular(_) => "not-unimodular",
            Error::MixedRadicand(_, _) => "mixed-radicand",
            Error::NeedsRefinement(_) => "needs-refinement",
            Error::IndeterminateDirection => "indeterminate-direction",
            Error::FiniteExpansion(_) => "finite-expansion",
            Error::RationalDirection => "rational-direction-rejected",
            Error::SearchExhausted { .. } => "search-exhausted",
            Error::Parse(_) => "parse-error",
            Error::Internal(_) => "internal-error",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn refine(msg: impl Into<String>) -> Self {
        Error::NeedsRefinement(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
