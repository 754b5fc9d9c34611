use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluator rejected nilpotent input ({0}); use finite differences")]
    NilpotentRejected(String),

    #[error("matrix is not positive semidefinite{}: min eigenvalue {min_eig:e}", letter.map(|i| format!(" (letter x{i})")).unwrap_or_default())]
    NotPsd { letter: Option<usize>, min_eig: f64 },

    #[error("insufficient truncation degree: need degree {needed}, series has {have}")]
    InsufficientDegree { needed: usize, have: usize },

    #[error("not a moment sequence: {0}")]
    NotAMomentSequence(String),

    #[error("output is not self-adjoint: {0}")]
    NonSelfAdjoint(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("tube boundary reached: {0}")]
    TubeBoundary(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("domain sampling failed: {0}")]
    Sampling(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("no data: {0}")]
    NoData(String),

    #[error("malformed input: {0}")]
    Format(String),
}
