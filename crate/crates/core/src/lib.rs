//! Weighted-similarity k-nearest-neighbour forecasting for seasonal series
//! with exogenous predictors.
//!
//! Three similarities are combined: time proximity, circular period
//! proximity and predictor-vector proximity. Forecasts average the response
//! over the `k` most similar past observations; the weights and `k` come from
//! a seeded random search. A synthetic benchmark generator, CSV/JSON IO and a
//! command-line front end (`knnwt`) sit on top.
//!
//! All user-facing observation indices are 1-based.

pub mod cli;
pub mod dataio;
pub mod dataset;
pub mod distance;
pub mod error;
pub mod forecast;
pub mod similarity;
pub mod simulation;
pub mod tuning;

pub use dataset::{build_dataset, Matrix, TimeSeriesDataset};
pub use distance::Metric;
pub use error::{Error, Result};
pub use forecast::{knn_forecast, ForecastResult, NeighborSet};
pub use similarity::{sw_matrix, SimilarityMatrix, WeightTriple};
pub use simulation::{simulate_series, Family, SimulationConfig};
pub use tuning::{random_search_tune, TuningConfig, TuningReport};
