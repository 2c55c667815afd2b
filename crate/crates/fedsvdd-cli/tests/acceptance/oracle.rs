//! Independent oracles for the acceptance suite: a dense projected-gradient
//! solver for the dual problem and an exhaustive pair-counting AUC. Both are
//! deliberately separate from the library's solver and metric paths.

pub struct PgdSolution {
    #[allow(dead_code)]
    pub beta: Vec<f64>,
    pub objective: f64,
}

/// Projected-gradient descent on min beta' K beta over
/// { sum(beta) = 1, 0 <= beta_i <= C }, fixed 1/L step, run to `tol` on the
/// gradient-mapping residual.
pub fn pgd_solve(points: &[Vec<f64>], gamma: f64, c: f64, tol: f64, max_iters: usize) -> PgdSolution {
    let n = points.len();
    assert!(n >= 1 && c * n as f64 >= 1.0 - 1e-12);
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d2: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            k[i * n + j] = (-gamma * d2).exp();
        }
    }

    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 1.0;
    for _ in 0..100 {
        let mut w = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                w[i] += k[i * n + j] * v[j];
            }
        }
        lambda = w.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / lambda;
        }
    }
    let step = 1.0 / (2.0 * lambda * 1.05);

    let mut beta = vec![1.0 / n as f64; n];
    for _ in 0..max_iters {
        let mut grad = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                grad[i] += 2.0 * k[i * n + j] * beta[j];
            }
        }
        let moved: Vec<f64> = beta.iter().zip(&grad).map(|(b, g)| b - step * g).collect();
        let next = project_capped_simplex(&moved, c);
        let residual = beta
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / step;
        beta = next;
        if residual <= tol {
            break;
        }
    }
    let mut objective = 0.0;
    for i in 0..n {
        for j in 0..n {
            objective += beta[i] * k[i * n + j] * beta[j];
        }
    }
    PgdSolution { beta, objective }
}

fn project_capped_simplex(v: &[f64], c: f64) -> Vec<f64> {
    let mass = |theta: f64| -> f64 { v.iter().map(|&vi| (vi - theta).clamp(0.0, c)).sum() };
    let mut lo = v.iter().cloned().fold(f64::INFINITY, f64::min) - c - 1.0;
    let mut hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-18 {
            break;
        }
    }
    let theta = 0.5 * (lo + hi);
    v.iter().map(|&vi| (vi - theta).clamp(0.0, c)).collect()
}

/// Pair-by-pair AUC: P(outlierness(anomaly) > outlierness(normal)) with
/// ties counted one half.
pub fn auc_by_pairs(scores: &[f64], is_anomaly: &[bool]) -> f64 {
    let mut concordant = 0.0;
    let mut pairs = 0.0;
    for (i, &ai) in is_anomaly.iter().enumerate() {
        if !ai {
            continue;
        }
        for (j, &aj) in is_anomaly.iter().enumerate() {
            if aj {
                continue;
            }
            pairs += 1.0;
            if -scores[i] > -scores[j] {
                concordant += 1.0;
            } else if scores[i] == scores[j] {
                concordant += 0.5;
            }
        }
    }
    concordant / pairs
}

/// Minimal deterministic generator for oracle sweeps.
pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> Self {
        XorShift(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn points(&mut self, n: usize, d: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..d).map(|_| self.unit()).collect())
            .collect()
    }
}
