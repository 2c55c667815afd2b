//! Seeded synthetic benchmark for dataset-free testing.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::matrix::{squared_distance, Matrix};
use crate::rng::SeedDeriver;

use super::{Dataset, Label};

const COMPONENTS: usize = 3;
const COMPONENT_STD: f64 = 0.06;
const ANOMALY_MARGIN: f64 = 0.2;
const CENTER_LOW: f64 = 0.25;
const CENTER_HIGH: f64 = 0.75;

/// Mixture centers the generator uses for a given (dimension, seed); exposed
/// so tests can verify anomaly placement against them.
pub fn synthetic_benchmark_centers(d: usize, seed: u64) -> Matrix {
    let mut rng = SeedDeriver::new(seed).mix_str("synthetic-centers").rng();
    let rows: Vec<Vec<f64>> = (0..COMPONENTS)
        .map(|_| (0..d).map(|_| rng.gen_range(CENTER_LOW..CENTER_HIGH)).collect())
        .collect();
    Matrix::from_rows(&rows).expect("fixed-size center matrix")
}

/// Normals come from a seeded Gaussian mixture inside the unit cube;
/// anomalies are drawn uniformly on the cube and rejected while within
/// `ANOMALY_MARGIN` of any mixture center. If rejection stalls (tiny cubes
/// in low dimension) the margin is halved so generation always terminates.
pub fn generate_synthetic_benchmark(
    n_normal: usize,
    n_anomaly: usize,
    d: usize,
    seed: u64,
) -> Result<Dataset> {
    let n_normal = n_normal.max(1);
    let n_anomaly = n_anomaly.max(1);
    let d = d.max(1);
    let centers = synthetic_benchmark_centers(d, seed);
    let mut rng = SeedDeriver::new(seed).mix_str("synthetic-points").rng();
    let noise = Normal::new(0.0, COMPONENT_STD).expect("positive stddev");

    let mut rows = Vec::with_capacity(n_normal + n_anomaly);
    let mut labels = Vec::with_capacity(n_normal + n_anomaly);
    for _ in 0..n_normal {
        let component = rng.gen_range(0..COMPONENTS);
        let center = centers.row(component);
        let point: Vec<f64> = center
            .iter()
            .map(|&c| (c + noise.sample(&mut rng)).clamp(0.0, 1.0))
            .collect();
        rows.push(point);
        labels.push(Label::Normal);
    }

    let mut margin = ANOMALY_MARGIN;
    let margin2 = |m: f64| m * m;
    for _ in 0..n_anomaly {
        let mut attempts = 0usize;
        loop {
            let candidate: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            let clear = centers
                .iter_rows()
                .all(|c| squared_distance(c, &candidate) >= margin2(margin));
            if clear {
                rows.push(candidate);
                labels.push(Label::Anomaly);
                break;
            }
            attempts += 1;
            if attempts % 1000 == 0 {
                margin *= 0.5;
            }
        }
    }

    Dataset::new(Matrix::from_rows(&rows)?, labels, "synthetic")
}
