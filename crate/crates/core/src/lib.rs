//! Graph classification with local degree profiles.
//!
//! - [`graph`] and [`tu`]: graph model and the multi-file benchmark format
//! - [`features`]: per-node degree statistics aggregated into graph vectors
//! - [`svm`]: SMO-trained kernel SVM with one-vs-one voting
//! - [`eval`]: stratified repeated cross-validation, grid search and tables
//! - [`generate`]: seeded random graphs for tests and scaling runs

pub mod eval;
pub mod features;
pub mod generate;
pub mod graph;
pub mod svm;
pub mod tu;

use thiserror::Error;

pub use features::{FeatureConfig, GraphVector};
pub use graph::{Dataset, DatasetStats, Graph};

/// Any failure of the pipeline, grouped the way callers report them.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] tu::ParseError),
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Feature(#[from] features::FeatureError),
    #[error(transparent)]
    Svm(#[from] svm::SvmError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
}
