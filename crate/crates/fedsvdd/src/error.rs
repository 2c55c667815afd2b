use thiserror::Error;

use crate::model::SvddModel;

/// Errors produced by training, data handling, protocols and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("infeasible box bound: c = {c} with n = {n} violates c * n >= 1")]
    InfeasibleBound { c: f64, n: usize },

    #[error("solver did not converge after {iterations} iterations (KKT violation {violation:.3e})")]
    NotConverged {
        iterations: usize,
        violation: f64,
        /// Best iterate found, packaged as a model so callers can inspect it.
        best: Box<SvddModel>,
    },

    #[error("synthetic sampler starved: no accepted point after {attempts} attempts")]
    SamplerStarvation { attempts: usize },

    #[error("client {client} failed: {source}")]
    ClientFailed {
        client: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("partition requires n >= k, got n = {n}, k = {k}")]
    PartitionTooSmall { n: usize, k: usize },

    #[error("class {class:?} has {size} members, fewer than {folds} folds")]
    ClassSmallerThanFolds {
        class: String,
        size: usize,
        folds: usize,
    },

    #[error("AUC undefined: scores contain a single class")]
    UndefinedAuc,

    #[error("parse error in {path} at row {row}, column {column}: {message}")]
    Parse {
        path: String,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("contrast incomplete; missing cells: {}", missing.join(", "))]
    IncompleteContrast { missing: Vec<String> },

    #[error("experiment cell produced no successful run: {0}")]
    AllRunsFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
