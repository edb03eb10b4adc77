use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix has rank {rank} but {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("too large: {0}")]
    TooLarge(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("H_X * H_Z^T is nonzero")]
    NotOrthogonal,

    #[error("unsupported dimension: r_Z + r_X = {got}, expected n - 1 = {expected}")]
    UnsupportedDimension { got: usize, expected: usize },

    #[error("declared minimum distance {declared} but the code has distance {actual}")]
    DistanceMismatch { declared: usize, actual: usize },

    #[error("unknown code {0:?}")]
    UnknownCode(String),

    #[error("invalid probability {0}")]
    InvalidProbability(f64),

    #[error("qubit index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("no sign change in the given range: {0}")]
    NoBracket(String),

    #[error("catalog error: {0}")]
    Catalog(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
