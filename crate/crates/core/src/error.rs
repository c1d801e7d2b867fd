use thiserror::Error;

/// Errors surfaced by configuration, problem construction, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// Rejected before any function evaluation happens.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Evaluator failure tagged with the population index it occurred at.
    #[error("evaluation of candidate {index} failed: {source}")]
    Candidate {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("evaluator error: {0}")]
    Evaluator(String),
    #[error("non-finite objective value")]
    NonFiniteObjective,
    #[error("non-finite inequality constraint g[{0}]")]
    NonFiniteIneq(usize),
    #[error("non-finite equality constraint h[{0}]")]
    NonFiniteEq(usize),
    #[error("unknown problem `{name}`; known problems: {known}")]
    UnknownProblem { name: String, known: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wrap an evaluation failure with the index of the candidate being built.
    pub(crate) fn at_candidate(self, index: usize) -> Error {
        Error::Candidate {
            index,
            source: Box::new(self),
        }
    }

    /// True for errors a caller should report as bad configuration rather
    /// than as a failing evaluator.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::UnknownProblem { .. })
    }
}
