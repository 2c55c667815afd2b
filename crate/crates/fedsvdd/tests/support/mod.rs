//! Test-only oracles, independent of the library's solver and metrics paths.

#![allow(dead_code)]

pub mod pgd {
    //! Dense projected-gradient descent on the dual problem
    //! min beta' K beta s.t. sum(beta) = 1, 0 <= beta_i <= C.
    //!
    //! Deliberately shares nothing with the SMO implementation: it builds
    //! the full Gram matrix, steps along the exact gradient with a fixed
    //! 1/L step, and projects onto the constraint set by bisection.

    pub struct PgdSolution {
        pub beta: Vec<f64>,
        pub objective: f64,
        pub iterations: usize,
    }

    pub fn solve(points: &[Vec<f64>], gamma: f64, c: f64, tol: f64, max_iters: usize) -> PgdSolution {
        let n = points.len();
        assert!(n >= 1 && c * n as f64 >= 1.0 - 1e-12, "infeasible instance");
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

        // Lipschitz constant of the gradient: 2 * lambda_max(K), bounded
        // via power iteration with a safety factor.
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut lambda = 1.0;
        for _ in 0..100 {
            let mut w = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    w[i] += k[i * n + j] * v[j];
                }
            }
            lambda = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if lambda == 0.0 {
                lambda = 1.0;
                break;
            }
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / lambda;
            }
        }
        let step = 1.0 / (2.0 * lambda * 1.05);

        let mut beta = vec![1.0 / n as f64; n];
        let mut iterations = 0;
        while iterations < max_iters {
            let mut grad = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    grad[i] += 2.0 * k[i * n + j] * beta[j];
                }
            }
            let moved: Vec<f64> = beta
                .iter()
                .zip(&grad)
                .map(|(b, g)| b - step * g)
                .collect();
            let next = project_capped_simplex(&moved, c);
            let residual = beta
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                / step;
            beta = next;
            iterations += 1;
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
        PgdSolution {
            beta,
            objective,
            iterations,
        }
    }

    /// Euclidean projection onto { sum(x) = 1, 0 <= x_i <= c } by bisection
    /// on the shift theta in x_i = clip(v_i - theta, 0, c).
    pub fn project_capped_simplex(v: &[f64], c: f64) -> Vec<f64> {
        let mass = |theta: f64| -> f64 {
            v.iter().map(|&vi| (vi - theta).clamp(0.0, c)).sum()
        };
        let mut lo = v.iter().cloned().fold(f64::INFINITY, f64::min) - c - 1.0;
        let mut hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        debug_assert!(mass(lo) >= 1.0 && mass(hi) <= 1.0);
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
}

pub mod counting {
    //! Exhaustive pair-counting AUC, the oracle for the rank statistic.

    /// P(outlierness(anomaly) > outlierness(normal)) + 1/2 ties, counted
    /// pair by pair. `is_anomaly[i]` marks the positive class.
    pub fn auc_by_pairs(scores: &[f64], is_anomaly: &[bool]) -> f64 {
        let outlier: Vec<f64> = scores.iter().map(|s| -s).collect();
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
                if outlier[i] > outlier[j] {
                    concordant += 1.0;
                } else if outlier[i] == outlier[j] {
                    concordant += 0.5;
                }
            }
        }
        concordant / pairs
    }
}

pub mod datasets {
    //! Deterministic pseudo-random instance generation for oracle sweeps.
    //! A tiny xorshift keeps the tests free of extra dependencies and of
    //! the library's own seeding machinery.

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

        /// Uniform in [0, 1).
        pub fn unit(&mut self) -> f64 {
            (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
        }

        pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
            lo + (hi - lo) * self.unit()
        }

        pub fn below(&mut self, n: usize) -> usize {
            (self.next_u64() % n as u64) as usize
        }
    }

    /// Random points in the unit cube.
    pub fn random_points(rng: &mut XorShift, n: usize, d: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..d).map(|_| rng.unit()).collect())
            .collect()
    }
}
