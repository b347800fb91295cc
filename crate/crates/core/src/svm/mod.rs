//! Soft-margin kernel SVM solved in the dual, with one-vs-one multiclass
//! voting.

mod kernel;
mod model;
mod smo;

use thiserror::Error;

pub use kernel::{
    kernel_eval, GramMatrix, KernelRows, KernelSpec, OnDemandKernel, SubKernel, DENSE_CACHE_LIMIT,
};
pub use model::{class_pairs, solve_on_rows, train_binary, vote, MulticlassModel, SvmModel};
pub use smo::{dual_objective, solve_dual, DualSolution, SmoParams};

#[derive(Debug, Error, PartialEq)]
pub enum SvmError {
    #[error("vector length {got} does not match {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training data contains a single class")]
    SingleClass,
    #[error("non-finite feature or kernel value")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible dual point: {0}")]
    Infeasible(String),
    #[error("malformed model text: {0}")]
    ModelFormat(String),
}
