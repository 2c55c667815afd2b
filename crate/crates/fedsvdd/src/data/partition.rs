//! Client partitioning schemes.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::SeedDeriver;

use super::kmeans::kmeans;

pub const KMEANS_MAX_ITERS: usize = 100;
pub const KMEANS_TOL: f64 = 1e-4;

/// How observations are distributed across clients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Iid,
    Biased,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Iid => "iid",
            Scheme::Biased => "biased",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iid" => Ok(Scheme::Iid),
            "biased" => Ok(Scheme::Biased),
            other => Err(Error::InvalidParameter(format!(
                "unknown split scheme {other:?} (expected \"iid\" or \"biased\")"
            ))),
        }
    }
}

/// Disjoint index lists covering the partitioned index set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub assignments: Vec<Vec<usize>>,
    pub scheme: Scheme,
    pub seed: u64,
}

impl Partition {
    pub fn n_clients(&self) -> usize {
        self.assignments.len()
    }

    pub fn client_sizes(&self) -> Vec<usize> {
        self.assignments.iter().map(Vec::len).collect()
    }
}

/// Shuffle 0..n uniformly (seeded) and cut the permutation into k contiguous
/// chunks of size ceil(n/k) or floor(n/k).
pub fn iid_partition(n: usize, k: usize, seed: u64) -> Result<Partition> {
    if k == 0 || n < k {
        return Err(Error::PartitionTooSmall { n, k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = SeedDeriver::new(seed).mix_str("iid-partition").rng();
    order.shuffle(&mut rng);

    let base = n / k;
    let extra = n % k;
    let mut assignments = Vec::with_capacity(k);
    let mut cursor = 0;
    for client in 0..k {
        let size = base + usize::from(client < extra);
        assignments.push(order[cursor..cursor + size].to_vec());
        cursor += size;
    }
    Ok(Partition {
        assignments,
        scheme: Scheme::Iid,
        seed,
    })
}

/// One KMeans cluster per client: client i receives exactly the points of
/// cluster i. Sizes may be arbitrarily unbalanced. The same seed passed to
/// `kmeans` reproduces the underlying clustering.
pub fn biased_partition(points: &Matrix, k: usize, seed: u64) -> Result<Partition> {
    let clustering = kmeans(points, k, seed, KMEANS_MAX_ITERS, KMEANS_TOL)?;
    let mut assignments = vec![Vec::new(); k];
    for (i, &c) in clustering.labels.iter().enumerate() {
        assignments[c].push(i);
    }
    Ok(Partition {
        assignments,
        scheme: Scheme::Biased,
        seed,
    })
}
