use thiserror::Error;

use crate::game::ExternalitySign;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: {requested} exceeds the limit of {cap}")]
    SizeLimit {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed game: {0}")]
    MalformedGame(String),
    #[error("symmetry violation: {first} but {second}")]
    SymmetryViolation { first: String, second: String },
    #[error("invalid belief: {0}")]
    InvalidBelief(String),
    #[error("unsupported externality sign {0:?}: a strict positive or negative sign is required")]
    UnsupportedSign(ExternalitySign),
    #[error("no admissible continuation for coalition size {s} at n = {n}")]
    InfeasibleStep { n: usize, s: usize },
    #[error("generator error: {0}")]
    Generator(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
