use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every fallible operation in the crate returns this.
///
/// Variants split into two families: input validation problems
/// (`is_validation`) and numerical failures. The CLI maps them to
/// different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("degenerate region: {0}")]
    Degenerate(String),

    #[error("resonant denominator for depolarization factor {index}")]
    Resonance { index: usize },

    #[error("singular transform: {0}")]
    Singular(String),

    #[error("{context}: no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        context: String,
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("ill-conditioned system (condition number {0:.3e}); solution is not unique")]
    IllConditioned(f64),

    #[error("branch ambiguity: {0}")]
    Branch(String),

    #[error("{identity} violated: {detail}")]
    IdentityViolation { identity: String, detail: String },

    #[error("empty region: {0}")]
    EmptyRegion(String),
}

impl Error {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::UnsupportedDimension(_) | Error::Degenerate(_)
        )
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
