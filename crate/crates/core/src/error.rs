//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node id {id} out of range for graph with {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("edge ({0}, {1}) is not in the graph")]
    MissingEdge(usize, usize),

    #[error("invalid edge weight on ({u}, {v}): {reason}")]
    InvalidWeight { u: usize, v: usize, reason: String },

    #[error("edge ({0}, {1}) has no correlation weight")]
    MissingCorrelation(usize, usize),

    #[error("node {0} is isolated")]
    IsolatedNode(usize),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("degenerate edge ({0}, {1}): endpoints at zero distance")]
    DegenerateEdge(usize, usize),

    #[error("infinite transport cost between support points {0} and {1}")]
    InfiniteCost(usize, usize),

    #[error("invalid probability measure: {0}")]
    InvalidMeasure(String),

    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {gap:e}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("optimizer failed to converge: {0}")]
    NoConvergence(String),

    #[error("zero variance in column {0}")]
    ZeroVariance(String),

    #[error("non-positive price {value} at row {row} (date {date}), ticker {ticker}")]
    NonPositivePrice {
        row: usize,
        date: String,
        ticker: String,
        value: f64,
    },

    #[error("malformed price file: {0}")]
    Malformed(String),

    #[error("epoch ending {end_date}: {source}")]
    Epoch {
        end_date: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown epoch end date {0}")]
    UnknownEndDate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by bad input (files, arguments, data shape),
    /// false for numerical failures inside a computation.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Epoch { source, .. } => source.is_input_error(),
            Error::DegenerateEdge(..)
            | Error::InfiniteCost(..)
            | Error::NoConvergence(_)
            | Error::DegenerateSeries(_)
            | Error::NonFinite(..)
            | Error::Disconnected
            | Error::IsolatedNode(_)
            | Error::ZeroVariance(_) => false,
            _ => true,
        }
    }
}
