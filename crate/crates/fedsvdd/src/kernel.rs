//! Gaussian kernel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::squared_distance;

/// Width parameter of the Gaussian kernel k(a, b) = exp(-gamma * ||a - b||^2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    gamma: f64,
}

impl KernelParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be a positive finite real, got {gamma}"
            )));
        }
        Ok(KernelParams { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// exp(-gamma * ||a - b||^2); symmetric, in (0, 1], and 1 iff a == b.
pub fn gaussian_kernel(a: &[f64], b: &[f64], params: &KernelParams) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::InvalidParameter(
            "kernel inputs must have dimension >= 1".into(),
        ));
    }
    Ok(gaussian_kernel_unchecked(a, b, params.gamma))
}

/// Hot-path variant; callers guarantee equal dimensions.
#[inline]
pub(crate) fn gaussian_kernel_unchecked(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    (-gamma * squared_distance(a, b)).exp()
}
