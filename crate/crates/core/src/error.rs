use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Positions carried in variants (`index`, `row`) are 1-based, matching the
/// indexing convention of the public API.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input is empty: {0}")]
    Empty(&'static str),

    #[error("length mismatch: {what} has length {found}, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("period {period}{} is outside [1, {n_periods}]", at_position(.index))]
    PeriodOutOfRange {
        index: Option<usize>,
        period: i64,
        n_periods: u32,
    },

    #[error("number of periods must be at least 1")]
    InvalidPeriodCount,

    #[error("time orders must be strictly increasing (position {index})")]
    NonIncreasingTime { index: usize },

    #[error("non-finite value in {what} at position {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("distance must be non-negative and not NaN, got {0}")]
    NegativeDistance(f64),

    #[error("unknown distance metric `{0}` (expected euclidean, maximum, manhattan, canberra, binary or minkowski[:order])")]
    UnknownMetric(String),

    #[error("minkowski order must be positive and finite, got {0}")]
    InvalidMinkowskiOrder(f64),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("exogenous predictors are required when the predictor weight is positive")]
    MissingExogenous,

    #[error("invalid similarity matrix: {0}")]
    InvalidSimilarityMatrix(String),

    #[error("k = {k} exceeds the {candidates} available neighbor candidates")]
    KTooLarge { k: usize, candidates: usize },

    #[error("k must be at least 1")]
    ZeroK,

    #[error("forecast index {index} is outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("forecast index {0} appears more than once")]
    DuplicateIndex(usize),

    #[error("no earlier observation shares the period of position {index}")]
    NoSeasonalPrior { index: usize },

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("actual value{} is zero; percent error is undefined (shift or rescale the series)", at_position(.index))]
    ZeroActual { index: Option<usize> },

    #[error("no hyperparameter set in the grid could be evaluated")]
    NoFeasibleRow,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid ARMA coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("invalid breakpoint {0}: must be at least 0.001 for the linear-to-sqrt shape")]
    InvalidBreakpoint(f64),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: `{value}` is not a number")]
    NonNumericValue {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: `{value}` is not an ISO-8601 date (YYYY-MM-DD)")]
    BadDate { row: usize, value: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn at_position(index: &Option<usize>) -> String {
    index.map(|i| format!(" at position {i}")).unwrap_or_default()
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
