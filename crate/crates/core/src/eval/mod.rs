//! Evaluation protocol: stratified folds, repeated nested cross-validation,
//! feature-configuration grid search and result tables.

mod cv;
mod folds;
mod grid;
mod report;

use thiserror::Error;

pub use cv::{
    cross_validate, CvConfig, CvReport, FoldResult, KernelKind, ModelChoice, AUDIT_HEADER, DEFAULT_C_GRID,
    DEFAULT_GAMMA_GRID,
};
pub use folds::stratified_folds;
pub use grid::{grid_search, grid_search_with, GridSearchReport};
pub use report::{report_table, Table, Variant};

use crate::features::FeatureError;
use crate::svm::SvmError;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("{folds} folds requested for {examples} examples")]
    TooFewExamples { folds: usize, examples: usize },
    #[error("empty hyperparameter grid")]
    EmptyGrid,
    #[error("invalid evaluation config: {0}")]
    InvalidConfig(String),
    #[error("degenerate fold: {0}")]
    DegenerateFold(String),
    #[error("{vectors} vectors but {labels} labels")]
    LengthMismatch { vectors: usize, labels: usize },
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Svm(#[from] SvmError),
}
