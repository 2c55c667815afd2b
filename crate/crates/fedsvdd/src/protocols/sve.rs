//! Support vector election: clients send anonymised support vectors, the
//! server retrains a single sphere on their union.

use std::time::Instant;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{SvddHyperparams, SvddModel};
use crate::rng::SeedDeriver;
use crate::solver::{train_svdd, SolverSettings};

use super::{select_clients, FederationConfig, PhaseTimings, ProtocolRecord};

/// Anonymisation controls: Gaussian stddev, the allowed difference between
/// squared center distances, and the guided-correction step fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SveParams {
    pub sigma: f64,
    pub tau: f64,
    pub epsilon_step: f64,
    pub max_correction_iters: usize,
}

impl SveParams {
    pub fn new(sigma: f64, tau: f64, epsilon_step: f64, max_correction_iters: usize) -> Result<Self> {
        if !(sigma > 0.0) || !(tau > 0.0) {
            return Err(Error::InvalidParameter(
                "sigma and tau must be positive".into(),
            ));
        }
        if !(epsilon_step > 0.0 && epsilon_step < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon_step must lie in (0, 1), got {epsilon_step}"
            )));
        }
        if max_correction_iters == 0 {
            return Err(Error::InvalidParameter(
                "max_correction_iters must be positive".into(),
            ));
        }
        Ok(SveParams {
            sigma,
            tau,
            epsilon_step,
            max_correction_iters,
        })
    }
}

impl Default for SveParams {
    fn default() -> Self {
        SveParams {
            sigma: 1.0,
            tau: 1e-3,
            epsilon_step: 0.1,
            max_correction_iters: 500,
        }
    }
}

/// An anonymised vector; `fell_back` marks the degraded case where the
/// correction budget ran out and the original vector was kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnonymisedVector {
    pub point: Vec<f64>,
    pub fell_back: bool,
}

/// Replace `v` with a Gaussian draw centered on it, then walk the draw back
/// toward `v` (q <- q - eps * (q - v)) until the squared center distances
/// differ by at most tau. The walk contracts ||q - v|| geometrically, so it
/// terminates; if the iteration budget runs out anyway the original vector
/// is returned with the fallback flag set, keeping the round alive.
pub fn anonymise_support_vector(
    model: &SvddModel,
    v: &[f64],
    params: &SveParams,
    seed: u64,
) -> Result<AnonymisedVector> {
    let r2_v = model.r_squared(v)?;
    let noise = Normal::new(0.0, params.sigma).expect("validated stddev");
    let mut rng = SeedDeriver::new(seed).mix_str("anonymise-sv").rng();
    let mut q: Vec<f64> = v.iter().map(|&x| x + noise.sample(&mut rng)).collect();

    for _ in 0..=params.max_correction_iters {
        if (r2_v - model.r_squared_unchecked(&q)).abs() <= params.tau {
            return Ok(AnonymisedVector {
                point: q,
                fell_back: false,
            });
        }
        for (qi, &vi) in q.iter_mut().zip(v) {
            *qi -= params.epsilon_step * (*qi - vi);
        }
    }
    Ok(AnonymisedVector {
        point: v.to_vec(),
        fell_back: true,
    })
}

/// The server-retrained model plus how many vectors each client contributed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SveModel {
    pub model: SvddModel,
    pub contributed_sv_counts: Vec<(usize, usize)>,
}

/// Outcome of an election round.
#[derive(Debug, Clone)]
pub struct SveRun {
    pub model: SveModel,
    /// The merged vectors the server trained on (what actually crossed the
    /// client-server boundary).
    pub elected: Matrix,
    pub record: ProtocolRecord,
}

/// Run one election round: every selected client trains with the
/// server-imposed hyperparameters, anonymises its support vectors (or passes
/// them through), and the server retrains on the merged set.
pub fn run_sve(
    clients: &[Matrix],
    hp: SvddHyperparams,
    config: &FederationConfig,
    params: &SveParams,
    anonymise: bool,
) -> Result<SveRun> {
    if clients.len() != config.k {
        return Err(Error::InvalidParameter(format!(
            "expected {} client datasets, got {}",
            config.k,
            clients.len()
        )));
    }
    let mut selected = select_clients(config);
    let record_order = selected.clone();
    // Aggregation merges contributions in client-index order.
    selected.sort_unstable();

    let mut timings = PhaseTimings::default();
    let mut fallbacks = 0usize;
    let mut sv_counts = Vec::with_capacity(selected.len());
    let mut merged: Option<Matrix> = None;

    for &client in &selected {
        let pool = &clients[client];
        let fail = |source: Error| Error::ClientFailed {
            client,
            source: Box::new(source),
        };
        let t0 = Instant::now();
        let local = train_svdd(pool, hp, &SolverSettings::defaults(pool.n_rows())).map_err(fail)?;
        timings.local_training_secs += t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let mut contributed = 0usize;
        for sv_idx in 0..local.n_support_vectors() {
            let sv = local.support_vectors().row(sv_idx);
            let point = if anonymise {
                let seed = SeedDeriver::new(config.seed)
                    .mix_str("sve-anonymise")
                    .mix_u64(client as u64)
                    .mix_u64(sv_idx as u64)
                    .seed();
                let anon = anonymise_support_vector(&local, sv, params, seed).map_err(fail)?;
                if anon.fell_back {
                    fallbacks += 1;
                }
                anon.point
            } else {
                sv.to_vec()
            };
            let target = merged.get_or_insert_with(|| Matrix::empty(point.len()));
            target.push_row(&point).map_err(fail)?;
            contributed += 1;
        }
        timings.anonymisation_secs += t1.elapsed().as_secs_f64();
        sv_counts.push((client, contributed));
    }

    let elected = merged.ok_or(Error::EmptyTrainingSet)?;
    let t2 = Instant::now();
    let model = train_svdd(&elected, hp, &SolverSettings::defaults(elected.n_rows()))?;
    timings.aggregation_secs = t2.elapsed().as_secs_f64();

    Ok(SveRun {
        model: SveModel {
            model,
            contributed_sv_counts: sv_counts.clone(),
        },
        elected,
        record: ProtocolRecord {
            config: *config,
            selected: record_order,
            per_client_sv_counts: sv_counts,
            anonymisation_fallbacks: fallbacks,
            timings,
        },
    })
}
