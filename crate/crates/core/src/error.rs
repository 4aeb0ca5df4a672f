use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
///
/// The variants mirror the failure classes the CLI maps onto exit codes:
/// malformed input (`Structural`, `Argument`, `Parse`), a construction whose
/// hypotheses do not hold (`Precondition`), and a construction that produced
/// something the verifier rejects (`Internal`).
#[derive(Debug, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal verification mismatch: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
