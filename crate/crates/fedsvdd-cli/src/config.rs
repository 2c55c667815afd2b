//! Declarative run configuration: TOML file plus flag overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use fedsvdd::data::Scheme;
use fedsvdd::evaluation::{AlgorithmKind, GeneralizationSettings};
use fedsvdd::protocols::{SveParams, SyntheticSamplerParams};

use crate::CliError;

/// Which experimental design to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Plasticity,
    Generalization,
}

impl std::str::FromStr for Mode {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "plasticity" => Ok(Mode::Plasticity),
            "generalization" => Ok(Mode::Generalization),
            other => Err(CliError::Config(format!(
                "experiment.mode: unknown mode {other:?} (expected plasticity or generalization)"
            ))),
        }
    }
}

/// Fully validated run configuration with every default filled in.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub datasets: Vec<PathBuf>,
    pub synthetic: Option<SyntheticSpec>,
    pub algorithms: Vec<AlgorithmKind>,
    pub mode: Mode,
    pub k: Vec<usize>,
    pub f: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub anonymise: Vec<bool>,
    pub hyper_samples: usize,
    pub c_range: (f64, f64),
    pub gamma: f64,
    pub seeds: Vec<u64>,
    pub generalization: GeneralizationSettings,
    pub sve: SveParams,
    pub sampler: SyntheticSamplerParams,
    pub out_dir: PathBuf,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n_normal: usize,
    pub n_anomaly: usize,
    pub dimensions: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    experiment: Option<ExperimentSection>,
    generalization: Option<GeneralizationSection>,
    sve: Option<SveSection>,
    sampler: Option<SamplerSection>,
    synthetic: Option<SyntheticSection>,
    output: Option<OutputSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    datasets: Option<Vec<String>>,
    algorithms: Option<Vec<String>>,
    mode: Option<String>,
    k: Option<Vec<usize>>,
    f: Option<Vec<f64>>,
    schemes: Option<Vec<String>>,
    anonymise: Option<Vec<bool>>,
    hyper_samples: Option<usize>,
    c_min: Option<f64>,
    c_max: Option<f64>,
    gamma: Option<f64>,
    seed: Option<u64>,
    seeds: Option<Vec<u64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneralizationSection {
    outer_folds: Option<usize>,
    inner_folds: Option<usize>,
    search_samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SveSection {
    sigma: Option<f64>,
    tau: Option<f64>,
    epsilon_step: Option<f64>,
    max_correction_iters: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplerSection {
    sv_component_stddev: Option<f64>,
    mixture_weight_fit: Option<f64>,
    target_cap: Option<usize>,
    attempts_per_point: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SyntheticSection {
    n_normal: Option<usize>,
    n_anomaly: Option<usize>,
    dimensions: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<String>,
    workers: Option<usize>,
}

/// Flag-level overrides; every field beats the file when present.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub datasets: Option<Vec<String>>,
    pub algorithms: Option<Vec<String>>,
    pub mode: Option<Mode>,
    pub k: Option<Vec<usize>>,
    pub f: Option<Vec<f64>>,
    pub schemes: Option<Vec<String>>,
    pub anonymise: Option<Vec<bool>>,
    pub hyper_samples: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
}

pub fn parse_config(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let file: FileConfig = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::Config(format!("cannot read config file {}: {e}", p.display()))
            })?;
            toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => FileConfig::default(),
    };
    build(file, overrides)
}

fn build(file: FileConfig, over: &Overrides) -> Result<RunConfig, CliError> {
    let exp = file.experiment.unwrap_or_default();

    let datasets: Vec<PathBuf> = over
        .datasets
        .clone()
        .or(exp.datasets)
        .unwrap_or_default()
        .into_iter()
        .map(PathBuf::from)
        .collect();
    for (i, d) in datasets.iter().enumerate() {
        if !d.is_file() {
            return Err(CliError::Config(format!(
                "experiment.datasets[{i}]: dataset file not found: {}",
                d.display()
            )));
        }
    }

    let synthetic = file.synthetic.map(|s| SyntheticSpec {
        n_normal: s.n_normal.unwrap_or(300),
        n_anomaly: s.n_anomaly.unwrap_or(30),
        dimensions: s.dimensions.unwrap_or(4),
    });
    if datasets.is_empty() && synthetic.is_none() {
        return Err(CliError::Config(
            "experiment.datasets: name at least one dataset file or provide a [synthetic] section"
                .into(),
        ));
    }

    let algorithms = parse_list::<AlgorithmKind>(
        over.algorithms.clone().or(exp.algorithms),
        "experiment.algorithms",
        &AlgorithmKind::ALL,
    )?;
    let schemes = parse_list::<Scheme>(
        over.schemes.clone().or(exp.schemes),
        "experiment.schemes",
        &[Scheme::Iid, Scheme::Biased],
    )?;

    let mode = match (&over.mode, exp.mode) {
        (Some(m), _) => *m,
        (None, Some(s)) => s.parse()?,
        (None, None) => Mode::Plasticity,
    };

    let f = over.f.clone().or(exp.f).unwrap_or_else(|| vec![0.5, 1.0]);
    for (i, v) in f.iter().enumerate() {
        if !(*v > 0.0 && *v <= 1.0) {
            return Err(CliError::Config(format!(
                "experiment.f[{i}]: client fraction must lie in (0, 1], got {v}"
            )));
        }
    }
    let k = over.k.clone().or(exp.k).unwrap_or_else(|| vec![2, 5, 10]);
    for (i, v) in k.iter().enumerate() {
        if *v == 0 {
            return Err(CliError::Config(format!(
                "experiment.k[{i}]: client count must be >= 1"
            )));
        }
    }

    let c_min = exp.c_min.unwrap_or(0.2);
    let c_max = exp.c_max.unwrap_or(0.8);
    if !(c_min > 0.0 && c_min <= c_max && c_max <= 1.0) {
        return Err(CliError::Config(format!(
            "experiment.c_min/c_max: need 0 < c_min <= c_max <= 1, got ({c_min}, {c_max})"
        )));
    }
    let gamma = exp.gamma.unwrap_or(1.0);
    if !(gamma > 0.0) {
        return Err(CliError::Config(format!(
            "experiment.gamma: must be positive, got {gamma}"
        )));
    }
    let hyper_samples = over.hyper_samples.or(exp.hyper_samples).unwrap_or(10);
    if hyper_samples == 0 {
        return Err(CliError::Config(
            "experiment.hyper_samples: must be >= 1".into(),
        ));
    }

    let seeds = match (over.seed, exp.seeds, exp.seed) {
        (Some(s), _, _) => vec![s],
        (None, Some(list), _) if !list.is_empty() => list,
        (None, _, Some(s)) => vec![s],
        _ => vec![42],
    };

    let gen = file.generalization.unwrap_or_default();
    let generalization = GeneralizationSettings {
        outer_folds: gen.outer_folds.unwrap_or(3),
        inner_folds: gen.inner_folds.unwrap_or(3),
        search_samples: gen.search_samples.unwrap_or(10),
    };
    if generalization.outer_folds < 2 || generalization.inner_folds < 2 {
        return Err(CliError::Config(
            "generalization.outer_folds/inner_folds: must each be >= 2".into(),
        ));
    }
    if generalization.search_samples == 0 {
        return Err(CliError::Config(
            "generalization.search_samples: must be >= 1".into(),
        ));
    }

    let sve_file = file.sve.unwrap_or_default();
    let sve = SveParams::new(
        sve_file.sigma.unwrap_or(1.0),
        sve_file.tau.unwrap_or(1e-3),
        sve_file.epsilon_step.unwrap_or(0.1),
        sve_file.max_correction_iters.unwrap_or(500),
    )
    .map_err(|e| CliError::Config(format!("sve: {e}")))?;

    let sampler_file = file.sampler.unwrap_or_default();
    let target_cap = sampler_file.target_cap.unwrap_or(500);
    let attempts = sampler_file.attempts_per_point.unwrap_or(50);
    if target_cap == 0 || attempts == 0 {
        return Err(CliError::Config(
            "sampler.target_cap/attempts_per_point: must be >= 1".into(),
        ));
    }
    let sampler = SyntheticSamplerParams::new(
        sampler_file.sv_component_stddev.unwrap_or(0.05),
        sampler_file.mixture_weight_fit.unwrap_or(0.5),
        target_cap,
        attempts * target_cap,
    )
    .map_err(|e| CliError::Config(format!("sampler: {e}")))?;

    let out = file.output.unwrap_or_default();
    let out_dir = over
        .out_dir
        .clone()
        .or_else(|| out.dir.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let workers = over.workers.or(out.workers).unwrap_or(1).max(1);

    let anonymise = over
        .anonymise
        .clone()
        .or(exp.anonymise)
        .unwrap_or_else(|| vec![false, true]);
    if algorithms.is_empty() || k.is_empty() || f.is_empty() || schemes.is_empty() || anonymise.is_empty()
    {
        return Err(CliError::Config("experiment grid must be non-empty".into()));
    }

    Ok(RunConfig {
        datasets,
        synthetic,
        algorithms,
        mode,
        k,
        f,
        schemes,
        anonymise,
        hyper_samples,
        c_range: (c_min, c_max),
        gamma,
        seeds,
        generalization,
        sve,
        sampler,
        out_dir,
        workers,
    })
}

fn parse_list<T>(
    input: Option<Vec<String>>,
    key: &str,
    default: &[T],
) -> Result<Vec<T>, CliError>
where
    T: std::str::FromStr<Err = fedsvdd::Error> + Clone,
{
    match input {
        None => Ok(default.to_vec()),
        Some(items) => items
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.parse::<T>()
                    .map_err(|e| CliError::Config(format!("{key}[{i}]: {e}")))
            })
            .collect(),
    }
}
