//! The two experimental designs: plasticity (fit quality on the full
//! dataset) and generalization (nested cross-validation).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{biased_partition, iid_partition, stratified_kfold, Dataset, FeatureRanges, Scheme};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::protocols::{
    ensemble_score, run_esvdd, run_sve, FederationConfig, SveParams, SyntheticSamplerParams,
};
use crate::rng::SeedDeriver;
use crate::solver::{train_ocsvm_baseline, train_svdd, SolverSettings};
use crate::model::SvddHyperparams;

use super::auc;
use super::report::{ExperimentReport, ReportRow, RunDetail};

/// Algorithms the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Ocsvm,
    Svdd,
    Esvdd,
    Sve,
}

impl AlgorithmKind {
    pub fn is_federated(&self) -> bool {
        matches!(self, AlgorithmKind::Esvdd | AlgorithmKind::Sve)
    }

    pub const ALL: [AlgorithmKind; 4] = [
        AlgorithmKind::Ocsvm,
        AlgorithmKind::Svdd,
        AlgorithmKind::Esvdd,
        AlgorithmKind::Sve,
    ];
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgorithmKind::Ocsvm => "ocsvm",
            AlgorithmKind::Svdd => "svdd",
            AlgorithmKind::Esvdd => "esvdd",
            AlgorithmKind::Sve => "sve",
        })
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ocsvm" => Ok(AlgorithmKind::Ocsvm),
            "svdd" => Ok(AlgorithmKind::Svdd),
            "esvdd" => Ok(AlgorithmKind::Esvdd),
            "sve" => Ok(AlgorithmKind::Sve),
            other => Err(Error::InvalidParameter(format!(
                "unknown algorithm {other:?} (expected ocsvm, svdd, esvdd or sve)"
            ))),
        }
    }
}

/// One experiment cell: an algorithm under one federation configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmKind,
    pub k: usize,
    pub f: f64,
    pub scheme: Scheme,
    pub anonymise: bool,
    pub hyper_samples: usize,
    pub c_range: (f64, f64),
    pub gamma: f64,
    pub seeds: Vec<u64>,
    pub sve_params: SveParams,
    pub sampler: SyntheticSamplerParams,
}

impl ExperimentConfig {
    pub fn new(algorithm: AlgorithmKind, k: usize, f: f64, scheme: Scheme) -> Self {
        ExperimentConfig {
            algorithm,
            k,
            f,
            scheme,
            anonymise: false,
            hyper_samples: 10,
            c_range: (0.2, 0.8),
            gamma: 1.0,
            seeds: vec![0],
            sve_params: SveParams::default(),
            sampler: SyntheticSamplerParams::defaults(500),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hyper_samples == 0 {
            return Err(Error::InvalidParameter("hyper_samples must be >= 1".into()));
        }
        let (lo, hi) = self.c_range;
        if !(lo > 0.0 && hi <= 1.0 && lo <= hi) {
            return Err(Error::InvalidParameter(format!(
                "c_range must satisfy 0 < lo <= hi <= 1, got ({lo}, {hi})"
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("at least one seed is required".into()));
        }
        SvddHyperparams::new(hi, self.gamma)?;
        if self.algorithm.is_federated() {
            FederationConfig::new(self.k, self.f, self.scheme, 0)?;
        }
        Ok(())
    }

    fn cell_label(&self, dataset: &str) -> String {
        format!(
            "{dataset}/{}/k={}/f={}/{}/anonymise={}",
            self.algorithm, self.k, self.f, self.scheme, self.anonymise
        )
    }

    fn detail(&self, dataset: &str, seed: u64, sample: usize, hyper: f64) -> RunDetail {
        RunDetail {
            dataset: dataset.to_string(),
            algorithm: self.algorithm,
            k: self.k,
            f: self.f,
            scheme: self.scheme,
            anonymise: self.anonymise,
            seed,
            sample_index: sample,
            hyper_value: hyper,
            auc: None,
            error: None,
        }
    }
}

/// Uniform draw in `range` from the stream that is shared between the arms
/// of every contrast (it depends on the draw coordinates only).
fn draw_hyper(seed: u64, dataset: &str, sample: usize, range: (f64, f64)) -> f64 {
    let mut rng = SeedDeriver::new(seed)
        .mix_str("hyper")
        .mix_str(dataset)
        .mix_u64(sample as u64)
        .rng();
    rng.gen_range(range.0..=range.1)
}

fn partition_seed(seed: u64, dataset: &str, k: usize, scheme: Scheme, sample: usize) -> u64 {
    SeedDeriver::new(seed)
        .mix_str("partition")
        .mix_str(dataset)
        .mix_u64(k as u64)
        .mix_str(&scheme.to_string())
        .mix_u64(sample as u64)
        .seed()
}

fn federation_seed(seed: u64, dataset: &str, k: usize, f: f64, sample: usize) -> u64 {
    SeedDeriver::new(seed)
        .mix_str("federation")
        .mix_str(dataset)
        .mix_u64(k as u64)
        .mix_f64(f)
        .mix_u64(sample as u64)
        .seed()
}

/// Train the configured algorithm on `pool` and return a scoring closure.
fn fit_scorer(
    cfg: &ExperimentConfig,
    pool: &Matrix,
    hyper: f64,
    part_seed: u64,
    fed_seed: u64,
) -> Result<Box<dyn Fn(&[f64]) -> Result<f64>>> {
    match cfg.algorithm {
        AlgorithmKind::Svdd => {
            let hp = SvddHyperparams::new(hyper, cfg.gamma)?;
            let model = train_svdd(pool, hp, &SolverSettings::defaults(pool.n_rows()))?;
            Ok(Box::new(move |x| model.score(x)))
        }
        AlgorithmKind::Ocsvm => {
            let model = train_ocsvm_baseline(
                pool,
                hyper,
                cfg.gamma,
                &SolverSettings::defaults(pool.n_rows()),
            )?;
            Ok(Box::new(move |x| model.score(x)))
        }
        AlgorithmKind::Esvdd | AlgorithmKind::Sve => {
            let partition = match cfg.scheme {
                Scheme::Iid => iid_partition(pool.n_rows(), cfg.k, part_seed)?,
                Scheme::Biased => biased_partition(pool, cfg.k, part_seed)?,
            };
            let clients: Vec<Matrix> = partition
                .assignments
                .iter()
                .map(|idx| pool.select_rows(idx))
                .collect();
            let fed = FederationConfig::new(cfg.k, cfg.f, cfg.scheme, fed_seed)?;
            let hp = SvddHyperparams::new(hyper, cfg.gamma)?;
            if cfg.algorithm == AlgorithmKind::Esvdd {
                let run = run_esvdd(&clients, hp, &fed, &cfg.sampler, cfg.anonymise)?;
                let ensemble = run.ensemble;
                Ok(Box::new(move |x| ensemble_score(&ensemble, x)))
            } else {
                let run = run_sve(&clients, hp, &fed, &cfg.sve_params, cfg.anonymise)?;
                let model = run.model.model;
                Ok(Box::new(move |x| model.score(x)))
            }
        }
    }
}

fn score_dataset(
    scorer: &dyn Fn(&[f64]) -> Result<f64>,
    data: &Dataset,
) -> Result<Vec<f64>> {
    data.features().iter_rows().map(scorer).collect()
}

fn summarize(aucs: &[f64]) -> (f64, f64) {
    let n = aucs.len() as f64;
    let mean = aucs.iter().sum::<f64>() / n;
    let var = aucs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Fit-quality experiment: no train/test separation. The whole dataset is
/// the training pool and the evaluation set; each hyperparameter draw
/// (C, or nu for the baseline) trains once and scores everything.
///
/// `data` must already be min-max normalized. Failed draws (for example an
/// infeasible bound on a small biased client) are recorded per run; the cell
/// errors only when every draw fails.
pub fn run_plasticity_experiment(data: &Dataset, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let pool = data.features();
    let mut runs = Vec::new();
    let mut aucs = Vec::new();
    for &seed in &cfg.seeds {
        for sample in 0..cfg.hyper_samples {
            let hyper = draw_hyper(seed, data.name(), sample, cfg.c_range);
            let mut detail = cfg.detail(data.name(), seed, sample, hyper);
            let part_seed = partition_seed(seed, data.name(), cfg.k, cfg.scheme, sample);
            let fed_seed = federation_seed(seed, data.name(), cfg.k, cfg.f, sample);
            match fit_scorer(cfg, pool, hyper, part_seed, fed_seed)
                .and_then(|scorer| score_dataset(&*scorer, data))
                .and_then(|scores| auc(&scores, data.labels()))
            {
                Ok(result) => {
                    detail.auc = Some(result.auc);
                    aucs.push(result.auc);
                }
                Err(e) => detail.error = Some(e.to_string()),
            }
            runs.push(detail);
        }
    }
    if aucs.is_empty() {
        return Err(Error::AllRunsFailed(cfg.cell_label(data.name())));
    }
    let (mean, std) = summarize(&aucs);
    Ok(ExperimentReport {
        rows: vec![ReportRow {
            dataset: data.name().to_string(),
            algorithm: cfg.algorithm,
            k: cfg.k,
            f: cfg.f,
            scheme: cfg.scheme,
            anonymise: cfg.anonymise,
            auc_mean: mean,
            auc_std: std,
            n_runs: aucs.len(),
        }],
        runs,
    })
}

/// Fold and search-size controls for the nested cross-validation design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizationSettings {
    pub outer_folds: usize,
    pub inner_folds: usize,
    pub search_samples: usize,
}

impl Default for GeneralizationSettings {
    fn default() -> Self {
        GeneralizationSettings {
            outer_folds: 3,
            inner_folds: 3,
            search_samples: 10,
        }
    }
}

/// Generalization experiment: stratified nested cross-validation with a
/// randomized search over C. Models train on the normal points of their
/// training split (the one-class setting); validation and test folds are
/// scored in full. `data` is taken raw; ranges are fitted per outer fold.
pub fn run_generalization_experiment(
    data: &Dataset,
    cfg: &ExperimentConfig,
    settings: &GeneralizationSettings,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    if settings.outer_folds < 2 || settings.inner_folds < 2 || settings.search_samples == 0 {
        return Err(Error::InvalidParameter(
            "generalization settings must have >= 2 folds and >= 1 search sample".into(),
        ));
    }
    let mut runs = Vec::new();
    let mut fold_aucs = Vec::new();
    for &seed in &cfg.seeds {
        let outer_seed = SeedDeriver::new(seed)
            .mix_str("outer-folds")
            .mix_str(data.name())
            .seed();
        let outer = stratified_kfold(data, settings.outer_folds, outer_seed)?;
        for (fold_idx, (train_idx, test_idx)) in outer.iter().enumerate() {
            let mut detail = cfg.detail(data.name(), seed, fold_idx, f64::NAN);
            match run_outer_fold(data, cfg, settings, seed, fold_idx, train_idx, test_idx) {
                Ok((best_c, fold_auc)) => {
                    detail.hyper_value = best_c;
                    detail.auc = Some(fold_auc);
                    fold_aucs.push(fold_auc);
                }
                Err(e) => detail.error = Some(e.to_string()),
            }
            runs.push(detail);
        }
    }
    if fold_aucs.is_empty() {
        return Err(Error::AllRunsFailed(cfg.cell_label(data.name())));
    }
    let (mean, std) = summarize(&fold_aucs);
    Ok(ExperimentReport {
        rows: vec![ReportRow {
            dataset: data.name().to_string(),
            algorithm: cfg.algorithm,
            k: cfg.k,
            f: cfg.f,
            scheme: cfg.scheme,
            anonymise: cfg.anonymise,
            auc_mean: mean,
            auc_std: std,
            n_runs: fold_aucs.len(),
        }],
        runs,
    })
}

fn run_outer_fold(
    data: &Dataset,
    cfg: &ExperimentConfig,
    settings: &GeneralizationSettings,
    seed: u64,
    fold_idx: usize,
    train_idx: &[usize],
    test_idx: &[usize],
) -> Result<(f64, f64)> {
    let train_raw = data.subset(train_idx);
    let test_raw = data.subset(test_idx);
    let ranges = FeatureRanges::fit(train_raw.features());
    let train = ranges.apply_dataset(&train_raw)?;
    let test = ranges.apply_dataset(&test_raw)?;

    let mut search_rng = SeedDeriver::new(seed)
        .mix_str("search")
        .mix_str(data.name())
        .mix_u64(fold_idx as u64)
        .rng();
    let candidates: Vec<f64> = (0..settings.search_samples)
        .map(|_| search_rng.gen_range(cfg.c_range.0..=cfg.c_range.1))
        .collect();

    let inner_seed = SeedDeriver::new(seed)
        .mix_str("inner-folds")
        .mix_str(data.name())
        .mix_u64(fold_idx as u64)
        .seed();
    let inner = stratified_kfold(&train, settings.inner_folds, inner_seed)?;

    // Ties on the mean validation AUC resolve to the smaller C.
    let mut best: Option<(f64, f64)> = None; // (auc, c)
    for (c_idx, &candidate) in candidates.iter().enumerate() {
        let mut inner_aucs = Vec::new();
        for (inner_idx, (fit_idx, val_idx)) in inner.iter().enumerate() {
            let tag = SeedDeriver::new(seed)
                .mix_str("cv")
                .mix_str(data.name())
                .mix_u64(fold_idx as u64)
                .mix_u64(inner_idx as u64)
                .mix_u64(c_idx as u64)
                .seed();
            if let Ok(a) =
                evaluate_split(cfg, &train.subset(fit_idx), &train.subset(val_idx), candidate, tag)
            {
                inner_aucs.push(a);
            }
        }
        if inner_aucs.is_empty() {
            continue;
        }
        let mean = inner_aucs.iter().sum::<f64>() / inner_aucs.len() as f64;
        let better = match best {
            None => true,
            Some((best_auc, best_c)) => {
                mean > best_auc || (mean == best_auc && candidate < best_c)
            }
        };
        if better {
            best = Some((mean, candidate));
        }
    }
    let (_, best_c) = best.ok_or_else(|| {
        Error::AllRunsFailed(format!(
            "{} outer fold {fold_idx}: every inner evaluation failed",
            cfg.cell_label(data.name())
        ))
    })?;

    let tag = SeedDeriver::new(seed)
        .mix_str("cv-final")
        .mix_str(data.name())
        .mix_u64(fold_idx as u64)
        .seed();
    let fold_auc = evaluate_split(cfg, &train, &test, best_c, tag)?;
    Ok((best_c, fold_auc))
}

/// Train on the normal points of `fit` and score `eval` in full.
fn evaluate_split(
    cfg: &ExperimentConfig,
    fit: &Dataset,
    eval: &Dataset,
    hyper: f64,
    seed_tag: u64,
) -> Result<f64> {
    let normals = fit.subset(&fit.indices_of(crate::data::Label::Normal));
    let pool = normals.features();
    let part_seed = SeedDeriver::new(seed_tag).mix_str("partition").seed();
    let fed_seed = SeedDeriver::new(seed_tag).mix_str("federation").seed();
    let scorer = fit_scorer(cfg, pool, hyper, part_seed, fed_seed)?;
    let scores = score_dataset(&*scorer, eval)?;
    Ok(auc(&scores, eval.labels())?.auc)
}
