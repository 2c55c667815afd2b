//! Lloyd iterations with k-means++ seeding.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{squared_distance, Matrix};
use crate::rng::SeedDeriver;

/// Clustering output; `inertia_history` records the value after each
/// assignment step and is non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub centroids: Matrix,
    pub labels: Vec<usize>,
    pub inertia: f64,
    pub inertia_history: Vec<f64>,
}

/// Seeded k-means++ initialization followed by Lloyd iterations until the
/// largest centroid shift drops below `tol` or `max_iters` is reached.
/// Empty clusters are reseeded to the point farthest from its centroid.
pub fn kmeans(
    points: &Matrix,
    k: usize,
    seed: u64,
    max_iters: usize,
    tol: f64,
) -> Result<KMeansResult> {
    let n = points.n_rows();
    if k == 0 || n < k {
        return Err(Error::PartitionTooSmall { n, k });
    }
    let d = points.n_cols();
    let mut rng = SeedDeriver::new(seed).mix_str("kmeans").rng();

    // k-means++: first centroid uniform, the rest weighted by squared
    // distance to the nearest chosen centroid.
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points.row(rng.gen_range(0..n)).to_vec());
    let mut dist2: Vec<f64> = (0..n)
        .map(|i| squared_distance(points.row(i), &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = dist2.iter().sum();
        let chosen = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in dist2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            // All remaining mass at distance zero (duplicate-heavy data).
            rng.gen_range(0..n)
        };
        let c = points.row(chosen).to_vec();
        for i in 0..n {
            let d2 = squared_distance(points.row(i), &c);
            if d2 < dist2[i] {
                dist2[i] = d2;
            }
        }
        centroids.push(c);
    }

    let mut labels = vec![0usize; n];
    let mut history = Vec::new();
    for _ in 0..max_iters.max(1) {
        let inertia = assign(points, &centroids, &mut labels);
        history.push(inertia);

        reseed_empty_clusters(points, &mut centroids, &mut labels);

        // Mean update.
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, &v) in sums[c].iter_mut().zip(points.row(i)) {
                *s += v;
            }
        }
        let mut shift: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let mut moved = 0.0;
            for (j, s) in sums[c].iter().enumerate() {
                let new = s / counts[c] as f64;
                let delta = (new - centroids[c][j]).abs();
                if delta > moved {
                    moved = delta;
                }
                centroids[c][j] = new;
            }
            if moved > shift {
                shift = moved;
            }
        }
        if shift < tol {
            break;
        }
    }
    let inertia = assign(points, &centroids, &mut labels);
    reseed_empty_clusters(points, &mut centroids, &mut labels);
    history.push(inertia);

    Ok(KMeansResult {
        centroids: Matrix::from_rows(&centroids)?,
        labels,
        inertia,
        inertia_history: history,
    })
}

/// Nearest-centroid assignment (ties to the lowest index); returns inertia.
fn assign(points: &Matrix, centroids: &[Vec<f64>], labels: &mut [usize]) -> f64 {
    let mut inertia = 0.0;
    for i in 0..points.n_rows() {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (c, centroid) in centroids.iter().enumerate() {
            let d2 = squared_distance(points.row(i), centroid);
            if d2 < best_d {
                best_d = d2;
                best = c;
            }
        }
        labels[i] = best;
        inertia += best_d;
    }
    inertia
}

fn reseed_empty_clusters(points: &Matrix, centroids: &mut [Vec<f64>], labels: &mut [usize]) {
    let k = centroids.len();
    let mut counts = vec![0usize; k];
    for &c in labels.iter() {
        counts[c] += 1;
    }
    let empties: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
    if empties.is_empty() {
        return;
    }
    // Farthest points first, each reseeding one empty cluster.
    let mut by_distance: Vec<(f64, usize)> = (0..points.n_rows())
        .map(|i| (squared_distance(points.row(i), &centroids[labels[i]]), i))
        .collect();
    by_distance.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for (slot, &c) in empties.iter().enumerate() {
        let (_, point) = by_distance[slot];
        centroids[c] = points.row(point).to_vec();
        labels[point] = c;
    }
    // Re-assign so every point sits with its nearest centroid again.
    assign(points, centroids, labels);
}
