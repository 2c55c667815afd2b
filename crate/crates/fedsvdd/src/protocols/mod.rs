//! In-process federation simulator and the two federated algorithms.
//!
//! Clients are value snapshots handed to pure functions; there is no shared
//! state between simulated clients, and server aggregation merges client
//! results in client-index order, so every protocol run is deterministic in
//! (data, hyperparameters, seed).

mod esvdd;
mod sve;

pub use esvdd::{
    ensemble_predict, ensemble_score, run_esvdd, synthetic_dataset, EnsembleModel, EsvddRun,
    SyntheticSamplerParams,
};
pub use sve::{anonymise_support_vector, run_sve, AnonymisedVector, SveModel, SveParams, SveRun};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::Scheme;
use crate::error::{Error, Result};
use crate::rng::SeedDeriver;

/// Federation shape: total clients, participating fraction, split scheme,
/// and the seed all protocol randomness derives from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FederationConfig {
    pub k: usize,
    pub f: f64,
    pub scheme: Scheme,
    pub seed: u64,
}

impl FederationConfig {
    pub fn new(k: usize, f: f64, scheme: Scheme, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("client count k must be >= 1".into()));
        }
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "client fraction f must lie in (0, 1], got {f}"
            )));
        }
        Ok(FederationConfig { k, f, scheme, seed })
    }

    /// t = max(floor(f * k), 1); the small epsilon guards against float
    /// representations of f just under a round value.
    pub fn selected_count(&self) -> usize {
        (((self.f * self.k as f64) + 1e-9).floor() as usize).clamp(1, self.k)
    }
}

/// t distinct client indices sampled uniformly without replacement.
/// Implemented as a seeded permutation prefix, so smaller fractions select
/// a subset of what larger fractions would under the same seed.
pub fn select_clients(config: &FederationConfig) -> Vec<usize> {
    let mut order: Vec<usize> = (0..config.k).collect();
    let mut rng = SeedDeriver::new(config.seed).mix_str("select-clients").rng();
    order.shuffle(&mut rng);
    order.truncate(config.selected_count());
    order
}

/// Wall-clock of a protocol phase, in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub local_training_secs: f64,
    pub anonymisation_secs: f64,
    pub aggregation_secs: f64,
}

/// Run record emitted by either protocol: configuration, per-client support
/// vector counts, anonymisation fallbacks, and per-phase wall clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRecord {
    pub config: FederationConfig,
    pub selected: Vec<usize>,
    pub per_client_sv_counts: Vec<(usize, usize)>,
    pub anonymisation_fallbacks: usize,
    pub timings: PhaseTimings,
}
