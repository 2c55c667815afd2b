//! Ensemble protocol: every selected client contributes a locally trained
//! sphere (optionally retrained on a synthetic sample for anonymisation);
//! the server relays the collection as an ensemble.

use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{Prediction, SvddHyperparams, SvddModel};
use crate::rng::SeedDeriver;
use crate::solver::{train_svdd, SolverSettings};

use super::{select_clients, FederationConfig, PhaseTimings, ProtocolRecord};

/// Mixture sampler controls for the anonymising synthetic dataset: a normal
/// distribution fitted to the client data blended with small-variance
/// normals centered on support vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSamplerParams {
    pub sv_component_stddev: f64,
    pub mixture_weight_fit: f64,
    pub target_size: usize,
    pub max_attempts: usize,
}

impl SyntheticSamplerParams {
    pub fn new(
        sv_component_stddev: f64,
        mixture_weight_fit: f64,
        target_size: usize,
        max_attempts: usize,
    ) -> Result<Self> {
        if !(sv_component_stddev > 0.0) {
            return Err(Error::InvalidParameter(
                "sv_component_stddev must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&mixture_weight_fit) {
            return Err(Error::InvalidParameter(
                "mixture_weight_fit must lie in [0, 1]".into(),
            ));
        }
        if target_size == 0 || max_attempts == 0 {
            return Err(Error::InvalidParameter(
                "target_size and max_attempts must be positive".into(),
            ));
        }
        Ok(SyntheticSamplerParams {
            sv_component_stddev,
            mixture_weight_fit,
            target_size,
            max_attempts,
        })
    }

    /// Defaults for a client holding `local_n` points: stddev 0.05 (features
    /// are min-max normalized), equal mixture weights, target min(n, 500),
    /// and 50 draws of headroom per requested point.
    pub fn defaults(local_n: usize) -> Self {
        let target = local_n.clamp(1, 500);
        SyntheticSamplerParams {
            sv_component_stddev: 0.05,
            mixture_weight_fit: 0.5,
            target_size: target,
            max_attempts: 50 * target,
        }
    }

    /// Same mixture shape rescaled to a client of `local_n` points,
    /// preserving the attempts-per-point budget.
    pub fn scaled_to(&self, local_n: usize) -> Self {
        let per_point = (self.max_attempts / self.target_size).max(1);
        let target = self.target_size.min(local_n.max(1));
        SyntheticSamplerParams {
            target_size: target,
            max_attempts: per_point * target,
            ..*self
        }
    }
}

/// Draw points from the fitted/SV mixture and keep those inside the sphere.
/// Stops at `target_size` accepted points or `max_attempts` draws; zero
/// accepted points is a starvation error signalling a degenerate sphere.
pub fn synthetic_dataset(
    model: &SvddModel,
    local_data: &Matrix,
    params: &SyntheticSamplerParams,
    seed: u64,
) -> Result<Matrix> {
    if local_data.n_cols() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: local_data.n_cols(),
        });
    }
    let d = model.dim();
    let (mean, var) = local_data.column_moments();
    let std: Vec<f64> = var.iter().map(|v| v.sqrt()).collect();
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let sv_noise = Normal::new(0.0, params.sv_component_stddev).expect("validated stddev");
    let mut rng = SeedDeriver::new(seed).mix_str("synthetic-dataset").rng();

    let mut accepted = Matrix::empty(d);
    let mut attempts = 0usize;
    while attempts < params.max_attempts && accepted.n_rows() < params.target_size {
        attempts += 1;
        let candidate: Vec<f64> = if rng.gen::<f64>() < params.mixture_weight_fit {
            mean.iter()
                .zip(&std)
                .map(|(&m, &s)| m + s * unit.sample(&mut rng))
                .collect()
        } else {
            let sv = model
                .support_vectors()
                .row(rng.gen_range(0..model.n_support_vectors()));
            sv.iter()
                .map(|&v| v + sv_noise.sample(&mut rng))
                .collect()
        };
        if model.predict(&candidate)? == Prediction::Inlier {
            accepted.push_row(&candidate)?;
        }
    }
    if accepted.is_empty() {
        return Err(Error::SamplerStarvation { attempts });
    }
    Ok(accepted)
}

/// The merged client models; prediction and scoring are ensemble votes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    members: Vec<SvddModel>,
}

impl EnsembleModel {
    pub fn new(members: Vec<SvddModel>) -> Result<Self> {
        let dim = match members.first() {
            Some(m) => m.dim(),
            None => {
                return Err(Error::InvalidParameter(
                    "ensemble must have at least one member".into(),
                ))
            }
        };
        for m in &members {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
        }
        Ok(EnsembleModel { members })
    }

    pub fn members(&self) -> &[SvddModel] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }
}

/// Maximum member score when some member accepts the point (it is an
/// inlier), sum of all member scores otherwise, which penalizes points far
/// from many clients. The sign agrees with `ensemble_predict`.
pub fn ensemble_score(ensemble: &EnsembleModel, x: &[f64]) -> Result<f64> {
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for member in ensemble.members() {
        let s = member.score(x)?;
        if s > max {
            max = s;
        }
        sum += s;
    }
    Ok(if max >= 0.0 { max } else { sum })
}

/// Inlier iff at least one member predicts inlier.
pub fn ensemble_predict(ensemble: &EnsembleModel, x: &[f64]) -> Result<Prediction> {
    Ok(if ensemble_score(ensemble, x)? >= 0.0 {
        Prediction::Inlier
    } else {
        Prediction::Outlier
    })
}

/// Outcome of an ensemble round.
#[derive(Debug, Clone)]
pub struct EsvddRun {
    pub ensemble: EnsembleModel,
    pub record: ProtocolRecord,
}

/// Run one ensemble round over `clients` (one training pool per client,
/// indexed 0..k). With `anonymise` set, each selected client retrains on a
/// synthetic dataset before contributing its model.
pub fn run_esvdd(
    clients: &[Matrix],
    hp: SvddHyperparams,
    config: &FederationConfig,
    sampler: &SyntheticSamplerParams,
    anonymise: bool,
) -> Result<EsvddRun> {
    if clients.len() != config.k {
        return Err(Error::InvalidParameter(format!(
            "expected {} client datasets, got {}",
            config.k,
            clients.len()
        )));
    }
    let selected = select_clients(config);
    // Each member is a pure function of its own pool and derived seed; the
    // server merges contributions in client-index order.
    let mut merge_order = selected.clone();
    merge_order.sort_unstable();
    let mut timings = PhaseTimings::default();
    let mut members = Vec::with_capacity(selected.len());
    let mut sv_counts = Vec::with_capacity(selected.len());

    for &client in &merge_order {
        let pool = &clients[client];
        let fail = |source: Error| Error::ClientFailed {
            client,
            source: Box::new(source),
        };
        let t0 = Instant::now();
        let local = train_svdd(pool, hp, &SolverSettings::defaults(pool.n_rows())).map_err(fail)?;
        timings.local_training_secs += t0.elapsed().as_secs_f64();

        let contributed = if anonymise {
            let t1 = Instant::now();
            let seed = SeedDeriver::new(config.seed)
                .mix_str("esvdd-sampler")
                .mix_u64(client as u64)
                .seed();
            let synthetic =
                synthetic_dataset(&local, pool, &sampler.scaled_to(pool.n_rows()), seed)
                    .map_err(fail)?;
            let retrained = train_svdd(
                &synthetic,
                hp,
                &SolverSettings::defaults(synthetic.n_rows()),
            )
            .map_err(fail)?;
            timings.anonymisation_secs += t1.elapsed().as_secs_f64();
            retrained
        } else {
            local
        };
        sv_counts.push((client, contributed.n_support_vectors()));
        members.push(contributed);
    }

    let t2 = Instant::now();
    let ensemble = EnsembleModel::new(members)?;
    timings.aggregation_secs = t2.elapsed().as_secs_f64();

    Ok(EsvddRun {
        ensemble,
        record: ProtocolRecord {
            config: *config,
            selected,
            per_client_sv_counts: sv_counts,
            anonymisation_fallbacks: 0,
            timings,
        },
    })
}
