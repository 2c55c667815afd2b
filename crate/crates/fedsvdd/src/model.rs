//! Trained data-description sphere and the decision functions derived from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{gaussian_kernel_unchecked, KernelParams};
use crate::matrix::Matrix;

/// Box bound and kernel width shared by every training run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvddHyperparams {
    c: f64,
    gamma: f64,
}

impl SvddHyperparams {
    pub fn new(c: f64, gamma: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "box bound c must lie in (0, 1], got {c}"
            )));
        }
        KernelParams::new(gamma)?;
        Ok(SvddHyperparams { c, gamma })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kernel(&self) -> KernelParams {
        KernelParams::new(self.gamma).expect("validated at construction")
    }

    /// c * n >= 1 must hold or the constraint sum(beta) = 1 is unsatisfiable.
    pub fn check_feasible(&self, n: usize) -> Result<()> {
        if (self.c * n as f64) < 1.0 - 1e-12 {
            return Err(Error::InfeasibleBound { c: self.c, n });
        }
        Ok(())
    }
}

/// Crisp classification of a point against the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prediction {
    Inlier,
    Outlier,
}

/// The learnt sphere: support vectors, their multipliers, and the constants
/// needed to evaluate the squared feature-space distance to the center.
///
/// Invariants maintained by the solver:
/// - every stored multiplier exceeds the sparsity threshold,
/// - multipliers sum to 1 and respect the box bound,
/// - `radius_squared` is the squared distance at the sphere's surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvddModel {
    gamma: f64,
    c: f64,
    support_vectors: Matrix,
    multipliers: Vec<f64>,
    self_term: f64,
    radius_squared: f64,
}

/// Margin tolerance used to tell bounded multipliers (beta = C) apart from
/// free ones; clipping writes the bound exactly, so a tight band suffices.
pub(crate) const BOUND_EPS: f64 = 1e-9;

impl SvddModel {
    pub(crate) fn from_parts(
        hyperparams: SvddHyperparams,
        support_vectors: Matrix,
        multipliers: Vec<f64>,
        self_term: f64,
        radius_squared: f64,
    ) -> Self {
        SvddModel {
            gamma: hyperparams.gamma(),
            c: hyperparams.c(),
            support_vectors,
            multipliers,
            self_term,
            radius_squared,
        }
    }

    pub fn hyperparams(&self) -> SvddHyperparams {
        SvddHyperparams::new(self.c, self.gamma).expect("validated at construction")
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn support_vectors(&self) -> &Matrix {
        &self.support_vectors
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    pub fn self_term(&self) -> f64 {
        self.self_term
    }

    pub fn radius_squared(&self) -> f64 {
        self.radius_squared
    }

    pub fn dim(&self) -> usize {
        self.support_vectors.n_cols()
    }

    pub fn n_support_vectors(&self) -> usize {
        self.support_vectors.n_rows()
    }

    /// Indices of support vectors strictly inside the box (0 < beta < C).
    pub fn margin_indices(&self) -> Vec<usize> {
        (0..self.multipliers.len())
            .filter(|&i| self.multipliers[i] < self.c - BOUND_EPS)
            .collect()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Squared feature-space distance between the image of `x` and the
    /// sphere center: 1 - 2 * sum_j beta_j k(x_j, x) + self_term.
    pub fn r_squared(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.r_squared_unchecked(x))
    }

    pub(crate) fn r_squared_unchecked(&self, x: &[f64]) -> f64 {
        let mut cross = 0.0;
        for (sv, &beta) in self.support_vectors.iter_rows().zip(&self.multipliers) {
            cross += beta * gaussian_kernel_unchecked(sv, x, self.gamma);
        }
        1.0 - 2.0 * cross + self.self_term
    }

    /// radius^2 - R^2(x); positive inside the sphere, decreasing in R^2.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        Ok(self.radius_squared - self.r_squared(x)?)
    }

    /// Inlier iff score >= 0; the boundary resolves toward inlier because
    /// support vectors sit on the surface by construction.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        Ok(if self.score(x)? >= 0.0 {
            Prediction::Inlier
        } else {
            Prediction::Outlier
        })
    }
}
