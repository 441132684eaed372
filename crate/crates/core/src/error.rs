use std::path::PathBuf;

use thiserror::Error;

use crate::measure::DiscreteMeasure;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index:?} out of range for resolution {n}")]
    IndexOutOfRange { index: Vec<usize>, n: usize },

    #[error("budget `{name}` exceeded: requested {requested}, limit {limit}")]
    BudgetExceeded {
        name: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("flatness retries exhausted after {retries} attempts; best certificate ratio {best_ratio:.4}")]
    RetriesExhausted {
        retries: usize,
        best_ratio: f64,
        best: Box<DiscreteMeasure>,
    },

    #[error("negative round-off of magnitude {magnitude:e} exceeds the clip limit")]
    ClipExceeded { magnitude: f64 },

    #[error("exponents are infeasible: {0}")]
    Infeasible(String),

    #[error("non-finite intermediate value in {0}")]
    NonFinite(&'static str),

    #[error("too few data points for a fit: got {got}, need {need}")]
    TooFewPoints { got: usize, need: usize },

    #[error("all-zero annulus at radius {0}")]
    ZeroAnnulus(f64),

    #[error("failed to parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
