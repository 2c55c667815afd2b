//! Support vector data description with federated training protocols.
//!
//! The crate trains minimal enclosing spheres in Gaussian feature space and
//! simulates two federated protocols on top of them: an ensemble of client
//! models and a support-vector election with server-side retraining. An
//! evaluation harness measures anomaly-ranking quality (AUC) over seeded
//! experiment grids.

pub mod data;
pub mod error;
pub mod evaluation;
pub mod kernel;
pub mod matrix;
pub mod model;
pub mod protocols;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use kernel::{gaussian_kernel, KernelParams};
pub use matrix::Matrix;
pub use model::{Prediction, SvddHyperparams, SvddModel};
pub use solver::{train_ocsvm_baseline, train_svdd, SolverSettings};
