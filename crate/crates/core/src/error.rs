use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error{}: {msg}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, msg: String },

    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: i64, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("{what} too large: {got} exceeds limit {limit}")]
    TooLarge { what: &'static str, got: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),

    #[error("LAPACK returned info = {0}")]
    Lapack(i32),

    #[error("operation requires a full (dense) spectrum")]
    NeedsFullSpectrum,

    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Computational refusals (budget, convergence, overflow) as opposed to bad input.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::TooLarge { .. }
                | Error::Overflow(_)
                | Error::NonConvergence(_)
                | Error::Lapack(_)
                | Error::NeedsFullSpectrum
        )
    }
}
