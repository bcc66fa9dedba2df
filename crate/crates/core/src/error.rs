use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zeta has a pole at s = 1")]
    Pole,

    /// The requested accuracy needs more terms than `max_terms` allows.
    #[error("accuracy exhausted: best achievable bound {achieved:e} with {terms} terms (target {target:e})")]
    AccuracyExhausted {
        achieved: f64,
        target: f64,
        terms: usize,
    },

    #[error("singular Euler factor at prime {prime}")]
    SingularFactor { prime: u64 },

    #[error("evaluation failed at s = {node}: {source}")]
    EvaluationFailed {
        node: Complex64,
        #[source]
        source: Box<Error>,
    },

    #[error("evaluation failed at tau = {tau}: {source}")]
    SampleFailed {
        tau: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("witness verification failed: sup norm {achieved} >= eps {eps}")]
    WitnessFailed { achieved: f64, eps: f64 },

    #[error("no certified window with tau <= {search_bound:e}")]
    NotFound { search_bound: f64 },

    #[error("singular direction: geometric sum vanishes (theta = {theta})")]
    SingularDirection { theta: f64 },

    #[error("precondition failed at prime {prime}: {detail}")]
    PreconditionFailed { prime: u64, detail: String },

    #[error("run rejected: {failures} of {total} samples failed")]
    RunRejected { failures: usize, total: usize },

    #[error("stage `{stage}` failed: {detail}")]
    StageFailed { stage: &'static str, detail: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures that mean "the math did not check out", as opposed
    /// to bad input or an evaluation problem.
    pub fn is_verification_failure(&self) -> bool {
        matches!(
            self,
            Error::WitnessFailed { .. } | Error::NotFound { .. } | Error::StageFailed { .. }
        )
    }
}
