use thiserror::Error;

/// Structural problems with a model: unknown identifiers, broken bottom
/// discipline, empty knowledge sets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("{0} must not be empty")]
    Empty(&'static str),
    #[error("unknown {0}")]
    UnknownId(String),
    #[error("duplicate {0}")]
    DuplicateName(String),
    #[error("bottom-symbol discipline violated by `{rule}`: {reason}")]
    BottomDiscipline { rule: String, reason: String },
    #[error("stack word must end with the bottom symbol and contain it exactly once")]
    BadStack,
    #[error("pseudo-configurations need a nonempty state set")]
    EmptyStateSet,
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError { line, col, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("the initial subset must be nonempty")]
    InvalidSubset,
    #[error("witness pull-back failed: {0}")]
    PullBackFailure(String),
    #[error("instance does not fit this reduction: {0}")]
    WrongVariant(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AepsError {
    #[error("rule is not enabled at this configuration")]
    NotEnabled,
    #[error("rule {0} has two branches pushing the same word; normalise first")]
    NotNormalized(usize),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("state budget of {limit} exceeded ({what})")]
    CapExceeded { limit: usize, what: &'static str },
    #[error("the PDA is not deterministic")]
    NotDeterministic,
    #[error("not an accepting run of this A_P: {0}")]
    NotAnApsRun(String),
    #[error("search budget of {0} nodes exhausted")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

/// Everything the library can fail with.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Aeps(#[from] AepsError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("witness rejected: {0}")]
    Witness(#[from] crate::witness::Violation),
}
