//! SMO-style solver for the data-description dual problem:
//! minimize beta' K beta subject to sum(beta) = 1, 0 <= beta_i <= C.
//!
//! Pairwise coordinate updates preserve the equality constraint exactly.
//! Each step picks the maximal violating pair (smallest gradient among
//! coordinates that can grow, largest among those that can shrink) and
//! applies the closed-form one-dimensional minimizer clipped to the box.

use crate::error::{Error, Result};
use crate::kernel::gaussian_kernel_unchecked;
use crate::matrix::Matrix;
use crate::model::{SvddHyperparams, SvddModel, BOUND_EPS};

/// Stopping and sparsity controls for the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    kkt_tolerance: f64,
    max_iterations: usize,
    sparsity_threshold: f64,
}

impl SolverSettings {
    pub fn new(kkt_tolerance: f64, max_iterations: usize, sparsity_threshold: f64) -> Result<Self> {
        if !(kkt_tolerance > 0.0) || !(sparsity_threshold > 0.0) || max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "solver settings must all be strictly positive".into(),
            ));
        }
        Ok(SolverSettings {
            kkt_tolerance,
            max_iterations,
            sparsity_threshold,
        })
    }

    /// Defaults for a problem with `n` training points: tolerance 1e-6,
    /// iteration cap 100 * n^2, sparsity threshold 1e-8.
    pub fn defaults(n: usize) -> Self {
        SolverSettings {
            kkt_tolerance: 1e-6,
            max_iterations: 100 * n.max(1) * n.max(1),
            sparsity_threshold: 1e-8,
        }
    }

    pub fn kkt_tolerance(&self) -> f64 {
        self.kkt_tolerance
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn sparsity_threshold(&self) -> f64 {
        self.sparsity_threshold
    }
}

/// Full Gram matrix when it fits comfortably, kernel rows on demand otherwise.
const DENSE_GRAM_LIMIT: usize = 1024;

struct KernelOracle<'a> {
    data: &'a Matrix,
    gamma: f64,
    dense: Option<Vec<f64>>,
}

impl<'a> KernelOracle<'a> {
    fn new(data: &'a Matrix, gamma: f64) -> Self {
        let n = data.n_rows();
        let dense = (n <= DENSE_GRAM_LIMIT).then(|| {
            let mut k = vec![0.0; n * n];
            for i in 0..n {
                k[i * n + i] = 1.0;
                for j in (i + 1)..n {
                    let v = gaussian_kernel_unchecked(data.row(i), data.row(j), gamma);
                    k[i * n + j] = v;
                    k[j * n + i] = v;
                }
            }
            k
        });
        KernelOracle { data, gamma, dense }
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.dense {
            Some(k) => k[i * self.data.n_rows() + j],
            None => gaussian_kernel_unchecked(self.data.row(i), self.data.row(j), self.gamma),
        }
    }

    fn row_into(&self, i: usize, buf: &mut [f64]) {
        match &self.dense {
            Some(k) => {
                let n = self.data.n_rows();
                buf.copy_from_slice(&k[i * n..(i + 1) * n]);
            }
            None => {
                let xi = self.data.row(i);
                for (j, slot) in buf.iter_mut().enumerate() {
                    *slot = gaussian_kernel_unchecked(xi, self.data.row(j), self.gamma);
                }
            }
        }
    }
}

/// Train a data-description sphere on `data`.
///
/// Errors with `InfeasibleBound` when c * n < 1 and with `NotConverged`
/// (carrying the best iterate) when the iteration cap is reached before the
/// maximal KKT violation drops below the tolerance.
pub fn train_svdd(
    data: &Matrix,
    hp: SvddHyperparams,
    settings: &SolverSettings,
) -> Result<SvddModel> {
    let n = data.n_rows();
    if n == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if data.n_cols() == 0 {
        return Err(Error::InvalidParameter(
            "training points must have dimension >= 1".into(),
        ));
    }
    hp.check_feasible(n)?;

    let c = hp.c();
    let kernel = KernelOracle::new(data, hp.gamma());

    // Uniform start is always feasible under c * n >= 1.
    let mut beta = vec![1.0 / n as f64; n];
    // Gradient of beta' K beta is 2 K beta.
    let mut grad = vec![0.0; n];
    let mut row = vec![0.0; n];
    for i in 0..n {
        kernel.row_into(i, &mut row);
        let mut acc = 0.0;
        for (kij, &bj) in row.iter().zip(&beta) {
            acc += kij * bj;
        }
        grad[i] = 2.0 * acc;
    }

    let mut row_j = vec![0.0; n];
    let mut best_beta = beta.clone();
    let mut best_violation = f64::INFINITY;
    let mut converged = false;
    let mut violation = 0.0;
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        // Maximal violating pair; ties resolve to the lowest index.
        let mut i_up = None;
        let mut g_up = f64::INFINITY;
        let mut j_down = None;
        let mut g_down = f64::NEG_INFINITY;
        for idx in 0..n {
            let g = grad[idx];
            if beta[idx] < c && g < g_up {
                g_up = g;
                i_up = Some(idx);
            }
            if beta[idx] > 0.0 && g > g_down {
                g_down = g;
                j_down = Some(idx);
            }
        }
        let (i, j) = match (i_up, j_down) {
            (Some(i), Some(j)) => (i, j),
            // Every coordinate pinned at a bound satisfies KKT trivially.
            _ => {
                converged = true;
                violation = 0.0;
                break;
            }
        };

        violation = g_down - g_up;
        if violation < best_violation {
            best_violation = violation;
            best_beta.copy_from_slice(&beta);
        }
        if violation < settings.kkt_tolerance {
            converged = true;
            break;
        }

        // Curvature along e_i - e_j; k(x, x) = 1 for the Gaussian kernel.
        let eta = 2.0 * (1.0 - kernel.entry(i, j));
        let head_room = c - beta[i];
        let tail_room = beta[j];
        let unconstrained = if eta > f64::MIN_POSITIVE {
            violation / (2.0 * eta)
        } else {
            f64::INFINITY
        };

        // Assign bounds exactly when the box clips the step, so the
        // increase/decrease sets stay clean under float rounding.
        if unconstrained >= head_room.min(tail_room) {
            if head_room <= tail_room {
                beta[i] = c;
                beta[j] -= head_room;
            } else {
                beta[i] += tail_room;
                beta[j] = 0.0;
            }
            let delta = head_room.min(tail_room);
            if delta <= 0.0 {
                // No representable progress; report honestly below.
                break;
            }
            update_gradient(&kernel, i, j, delta, &mut grad, &mut row, &mut row_j);
        } else {
            beta[i] += unconstrained;
            beta[j] -= unconstrained;
            update_gradient(&kernel, i, j, unconstrained, &mut grad, &mut row, &mut row_j);
        }
        iterations += 1;
    }

    if converged {
        Ok(finalize(data, hp, &beta, settings))
    } else {
        if best_violation < violation {
            beta.copy_from_slice(&best_beta);
        }
        Err(Error::NotConverged {
            iterations,
            violation: best_violation.min(violation),
            best: Box::new(finalize(data, hp, &beta, settings)),
        })
    }
}

fn update_gradient(
    kernel: &KernelOracle,
    i: usize,
    j: usize,
    delta: f64,
    grad: &mut [f64],
    row_i: &mut [f64],
    row_j: &mut [f64],
) {
    kernel.row_into(i, row_i);
    kernel.row_into(j, row_j);
    for ((g, ki), kj) in grad.iter_mut().zip(row_i.iter()).zip(row_j.iter()) {
        *g += 2.0 * delta * (ki - kj);
    }
}

/// Drop numerically null multipliers, restore sum(beta) = 1, and derive the
/// self term and squared radius from the retained support vectors.
fn finalize(
    data: &Matrix,
    hp: SvddHyperparams,
    beta: &[f64],
    settings: &SolverSettings,
) -> SvddModel {
    let kept: Vec<usize> = (0..beta.len())
        .filter(|&i| beta[i] > settings.sparsity_threshold)
        .collect();
    let mut multipliers: Vec<f64> = kept.iter().map(|&i| beta[i]).collect();
    let total: f64 = multipliers.iter().sum();
    for b in &mut multipliers {
        *b = (*b / total).min(hp.c());
    }
    let support_vectors = data.select_rows(&kept);

    let s = multipliers.len();
    let gamma = hp.gamma();
    let mut self_term = 0.0;
    let mut cross = vec![0.0; s]; // sum_b beta_b k(sv_a, sv_b) per retained vector
    for a in 0..s {
        self_term += multipliers[a] * multipliers[a];
        cross[a] += multipliers[a];
        for b in (a + 1)..s {
            let k = gaussian_kernel_unchecked(support_vectors.row(a), support_vectors.row(b), gamma);
            self_term += 2.0 * multipliers[a] * multipliers[b] * k;
            cross[a] += multipliers[b] * k;
            cross[b] += multipliers[a] * k;
        }
    }

    let r2: Vec<f64> = cross.iter().map(|&x| 1.0 - 2.0 * x + self_term).collect();
    let margin: Vec<f64> = (0..s)
        .filter(|&a| multipliers[a] < hp.c() - BOUND_EPS)
        .map(|a| r2[a])
        .collect();
    // The surface distance evaluates equally at any free support vector up
    // to solver tolerance; the median suppresses the residual jitter. With
    // every multiplier at the bound, the smallest distance is the radius.
    let radius_squared = if margin.is_empty() {
        r2.iter().cloned().fold(f64::INFINITY, f64::min)
    } else {
        median(margin)
    };

    SvddModel::from_parts(hp, support_vectors, multipliers, self_term, radius_squared)
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Hyperplane-style baseline realized through the dual equivalence: with the
/// Gaussian kernel the nu-parameterized problem coincides with the sphere
/// problem under C = 1 / (nu * n). The bound is clipped to 1 when nu * n < 1,
/// which leaves the solution unchanged because every beta_i <= sum(beta) = 1.
pub fn train_ocsvm_baseline(
    data: &Matrix,
    nu: f64,
    gamma: f64,
    settings: &SolverSettings,
) -> Result<SvddModel> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "nu must lie in (0, 1), got {nu}"
        )));
    }
    let n = data.n_rows();
    if n == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    let c = (1.0 / (nu * n as f64)).min(1.0);
    train_svdd(data, SvddHyperparams::new(c, gamma)?, settings)
}

/// Dual objective beta' K beta of a finalized model; used by diagnostics
/// and the solver oracle tests.
pub fn dual_objective(model: &SvddModel) -> f64 {
    let beta = model.multipliers();
    let svs = model.support_vectors();
    let gamma = model.gamma();
    let mut obj = 0.0;
    for a in 0..beta.len() {
        obj += beta[a] * beta[a];
        for b in (a + 1)..beta.len() {
            obj += 2.0
                * beta[a]
                * beta[b]
                * gaussian_kernel_unchecked(svs.row(a), svs.row(b), gamma);
        }
    }
    obj
}
