use thiserror::Error;

/// Errors produced by parsing, evaluation, strategy and reduction routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("duplicate variable `{0}` in universe")]
    DuplicateVariable(String),

    #[error("universe has {n} variables, limit is {max}")]
    VariableLimitExceeded { n: usize, max: usize },

    #[error("{count} pessimistic voters exceed the limit of {max}")]
    PopulationLimitExceeded { count: usize, max: usize },

    #[error("theory is inconsistent (no world models it)")]
    InconsistentTheory,

    #[error("voter population is empty")]
    EmptyPopulation,

    #[error("voter `{0}` has no threshold")]
    MissingThreshold(String),

    #[error("invalid preference for voter `{voter}` on `{variable}`: {reason}")]
    InvalidPreference {
        voter: String,
        variable: String,
        reason: String,
    },

    #[error("invalid rational `{0}` (expected `a/b` or an integer)")]
    InvalidRational(String),

    #[error("universe mismatch: expected {expected} variables, found {found}")]
    UniverseMismatch { expected: usize, found: usize },

    #[error("voter `{id}` is {found}, expected {expected}")]
    KindMismatch {
        id: String,
        expected: String,
        found: String,
    },

    #[error("unsupported voter kind for this operation: {0}")]
    UnsupportedKind(String),

    #[error("source formula is unsatisfiable")]
    UnsatisfiableSource,

    #[error("formula is not in clausal form: {0}")]
    NotCnf(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid voter file: {0}")]
    VoterFile(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
