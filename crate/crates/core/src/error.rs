use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("SVD did not converge after {sweeps} sweeps")]
    SvdNoConvergence { sweeps: usize },

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("spectrum is not normalized (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not doubly stochastic (deviation {deviation:e})")]
    NotDoublyStochastic { deviation: f64 },

    #[error("no perfect matching on the positive support of the residual matrix")]
    NoPerfectMatching,

    #[error("operator is not a contraction (norm {norm})")]
    NotAContraction { norm: f64 },

    #[error("rank condition violated: rank(A) = {source_rank} < rank(B) = {target_rank}")]
    RankViolation {
        source_rank: usize,
        target_rank: usize,
    },

    #[error("requested probability {requested} exceeds the maximal conversion probability {max}")]
    InfeasibleTarget { requested: f64, max: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}
