//! Multi-source real-estate price modelling.
//!
//! The pipeline derives amenity, traffic and emotion features around each
//! property, measures pairwise Pearson correlation, fits an OLS model and a
//! second-order gradient-boosted tree ensemble, ranks features by split
//! count, and runs a five-configuration feature-block ablation.
//!
//! - [`schema`]: the 26 features, their categories and the CSV header
//! - [`dataset`]: records, CSV ingestion and seeded train/test splits
//! - [`geofeatures`]: haversine radius queries and feature derivation
//! - [`stats`]: Pearson correlation and the correlation matrix
//! - [`linreg`]: least squares via Householder QR
//! - [`gbt`]: boosted regression trees and F-score importance
//! - [`metrics`]: R², adjusted R², MAE, MSE, RMSE
//! - [`experiment`]: ablation harness and report bundle
//! - [`synth`]: seeded synthetic datasets with a known price model

pub mod cli;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod gbt;
pub mod geofeatures;
pub mod linreg;
pub mod metrics;
pub mod schema;
pub mod stats;
pub mod svg;
pub mod synth;

pub use dataset::{ingest_csv, split, Dataset, PropertyRecord, SplitSpec};
pub use error::{Error, Result};
pub use experiment::{run_ablation, AblationConfig, AblationName, ExperimentResult, ModelKind};
pub use gbt::{feature_importance, fit_boosted, predict_boosted, BoostParams, BoostedEnsemble};
pub use linreg::{fit_linear, predict_linear, LinearModel};
pub use metrics::{evaluate, MetricsReport};
pub use schema::{Category, FeatureId};
pub use stats::{correlation_matrix, pearson, CorrelationMatrix};
