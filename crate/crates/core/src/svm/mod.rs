//! Soft-margin RBF-kernel SVM trained in the dual, wrapped one-vs-one.

mod kernel;
mod model;
mod smo;

pub use kernel::{rbf_kernel, GramMatrix};
pub use model::{
    predict_binary, predict_ovo, standardize, train_ovo, BinarySvmModel, Gamma,
    StandardizationStats, SvmConfig, TrainedOvoModel, MODEL_FORMAT_VERSION,
};
pub use smo::{dual_objective, solve_dual, DualSolution, KKT_TOLERANCE, MAX_PAIR_UPDATES};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SvmError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("targets must be +1 or -1, got {0}")]
    InvalidTarget(f64),
    #[error("training targets contain a single class")]
    SingleClass,
    #[error("gram matrix is not symmetric (max asymmetry {0:.3e})")]
    AsymmetricGram(f64),
    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("box bound C must be positive and finite, got {0}")]
    InvalidBoxBound(f64),
    #[error("need at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("class {0:?} has no samples")]
    EmptyClass(String),
    #[error("sample count {samples} does not match label count {labels}")]
    LabelCountMismatch { samples: usize, labels: usize },
    #[error("model file {path}: {reason}")]
    ModelFile { path: PathBuf, reason: String },
}
