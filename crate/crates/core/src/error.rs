use thiserror::Error;

use crate::lattice::{Vertex, Window};

/// Errors raised by lattice queries, simulations and the experiment driver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid vertex ({x},{t}): x + t must be even")]
    InvalidVertex { x: i64, t: i64 },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("vertex {0} lies outside the window")]
    OutOfWindow(Vertex),
    #[error(
        "window too narrow: {what} needs [{needed}] but the configuration only covers [{have}]"
    )]
    InsufficientWindow {
        what: &'static str,
        needed: Window,
        have: Window,
    },
    #[error("no path: {0} does not percolate to the horizon")]
    NoPath(Vertex),
    #[error("vertex {0} is not on the path")]
    NotOnPath(Vertex),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("vertex {0} is not in the forest")]
    NotInForest(Vertex),
    #[error("undecidable within the window: {0}")]
    Undecidable(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid experiment spec: field `{field}`: {msg}")]
    Validation { field: String, msg: String },
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
