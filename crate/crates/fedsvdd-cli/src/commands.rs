//! Command implementations behind the CLI entry points.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use fedsvdd::data::{
    biased_partition, generate_synthetic_benchmark, iid_partition, kmeans, load_dataset,
    minmax_normalize, Dataset, DatasetFormat, Scheme,
};
use fedsvdd::evaluation::{
    aggregate_differences, best_worst_summary, run_generalization_experiment,
    run_plasticity_experiment, write_detail_json, write_difference_csv, write_report_csv,
    AlgorithmKind, ContrastAxis, ExperimentConfig, ExperimentReport, SummaryRow,
};

use crate::config::{Mode, RunConfig};
use crate::CliError;

/// One grid cell: a dataset and a fully specified experiment configuration.
#[derive(Debug, Clone)]
struct Cell {
    dataset_index: usize,
    config: ExperimentConfig,
}

fn cell_label(datasets: &[Dataset], cell: &Cell) -> String {
    let cfg = &cell.config;
    let name = datasets[cell.dataset_index].name();
    if cfg.algorithm.is_federated() {
        format!(
            "{name}/{}/k={}/f={}/{}/anonymise={}",
            cfg.algorithm, cfg.k, cfg.f, cfg.scheme, cfg.anonymise
        )
    } else {
        format!("{name}/{}", cfg.algorithm)
    }
}

fn load_all_datasets(config: &RunConfig) -> Result<Vec<Dataset>, CliError> {
    let mut datasets = Vec::new();
    for path in &config.datasets {
        datasets.push(load_dataset(path, DatasetFormat::CsvLabeled)?);
    }
    if let Some(spec) = &config.synthetic {
        datasets.push(generate_synthetic_benchmark(
            spec.n_normal,
            spec.n_anomaly,
            spec.dimensions,
            config.seeds[0],
        )?);
    }
    Ok(datasets)
}

fn build_cells(config: &RunConfig, n_datasets: usize) -> Vec<Cell> {
    let mut cells = Vec::new();
    for dataset_index in 0..n_datasets {
        for &algorithm in &config.algorithms {
            let mut push = |k: usize, f: f64, scheme: Scheme, anonymise: bool| {
                let mut cfg = ExperimentConfig::new(algorithm, k, f, scheme);
                cfg.anonymise = anonymise;
                cfg.hyper_samples = config.hyper_samples;
                cfg.c_range = config.c_range;
                cfg.gamma = config.gamma;
                cfg.seeds = config.seeds.clone();
                cfg.sve_params = config.sve;
                cfg.sampler = config.sampler;
                cells.push(Cell {
                    dataset_index,
                    config: cfg,
                });
            };
            if algorithm.is_federated() {
                for &k in &config.k {
                    for &f in &config.f {
                        for &scheme in &config.schemes {
                            for &anonymise in &config.anonymise {
                                push(k, f, scheme, anonymise);
                            }
                        }
                    }
                }
            } else {
                // Centralized baselines have no federation axes.
                push(1, 1.0, Scheme::Iid, false);
            }
        }
    }
    cells
}

/// Execute the full grid and write every report artifact. Returns the number
/// of failed cells (partial results are written either way).
pub fn cmd_run(config: &RunConfig) -> Result<usize, CliError> {
    let raw = load_all_datasets(config)?;
    // Plasticity scores the dataset it trains on; normalize once up front.
    // Generalization fits ranges inside each outer fold and takes raw data.
    let prepared: Vec<Dataset> = match config.mode {
        Mode::Plasticity => raw
            .iter()
            .map(|d| minmax_normalize(d, &[]).map(|(out, _)| out))
            .collect::<Result<_, _>>()?,
        Mode::Generalization => raw,
    };

    let cells = build_cells(config, prepared.len());
    let total = cells.len();
    eprintln!(
        "running {total} grid cells on {} dataset(s) with {} worker(s)",
        prepared.len(),
        config.workers
    );

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<ExperimentReport, String>>>> =
        Mutex::new((0..total).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..config.workers.min(total.max(1)) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                if idx >= total {
                    break;
                }
                let cell = &cells[idx];
                let data = &prepared[cell.dataset_index];
                let outcome = match config.mode {
                    Mode::Plasticity => run_plasticity_experiment(data, &cell.config),
                    Mode::Generalization => {
                        run_generalization_experiment(data, &cell.config, &config.generalization)
                    }
                }
                .map_err(|e| e.to_string());
                eprintln!(
                    "[{}/{}] {} {}",
                    idx + 1,
                    total,
                    cell_label(&prepared, cell),
                    match &outcome {
                        Ok(r) => format!(
                            "auc = {:.4} +/- {:.4} (n = {})",
                            r.rows[0].auc_mean, r.rows[0].auc_std, r.rows[0].n_runs
                        ),
                        Err(e) => format!("FAILED: {e}"),
                    }
                );
                slots.lock().unwrap()[idx] = Some(outcome);
            });
        }
    });

    let mut report = ExperimentReport::default();
    let mut failures: Vec<String> = Vec::new();
    for (idx, slot) in slots.into_inner().unwrap().into_iter().enumerate() {
        match slot.expect("every cell executed") {
            Ok(partial) => report.merge(partial),
            Err(e) => failures.push(format!("{}: {e}", cell_label(&prepared, &cells[idx]))),
        }
    }

    std::fs::create_dir_all(&config.out_dir)?;
    write_report_csv(&report, config.out_dir.join("report.csv"))?;
    write_detail_json(&report, config.out_dir.join("report_detail.json"))?;
    write_contrasts(config, &report)?;

    print_summary(&best_worst_summary(&report), config.mode);

    if !failures.is_empty() {
        eprintln!("{} of {total} cells failed:", failures.len());
        for f in &failures {
            eprintln!("  {f}");
        }
    }
    Ok(failures.len())
}

/// Emit a difference CSV for every axis the grid actually contrasts.
fn write_contrasts(config: &RunConfig, report: &ExperimentReport) -> Result<(), CliError> {
    let has_federated = config
        .algorithms
        .iter()
        .any(AlgorithmKind::is_federated);
    let contrastable = |axis: ContrastAxis| -> bool {
        has_federated
            && match axis {
                ContrastAxis::SplitBias => {
                    config.schemes.contains(&Scheme::Iid) && config.schemes.contains(&Scheme::Biased)
                }
                ContrastAxis::ClientFraction => {
                    config.f.contains(&1.0) && config.f.contains(&0.5)
                }
                ContrastAxis::Anonymisation => {
                    config.anonymise.contains(&true) && config.anonymise.contains(&false)
                }
            }
    };
    for axis in [
        ContrastAxis::SplitBias,
        ContrastAxis::ClientFraction,
        ContrastAxis::Anonymisation,
    ] {
        if !contrastable(axis) {
            continue;
        }
        match aggregate_differences(report, axis) {
            Ok(rows) => {
                write_difference_csv(&rows, config.out_dir.join(format!("diff_{axis}.csv")))?
            }
            Err(e) => eprintln!("skipping diff_{axis}.csv: {e}"),
        }
    }
    Ok(())
}

/// Table-style summary on standard output: one line per dataset, best (+)
/// and worst (-) configuration per federated algorithm next to baselines.
fn print_summary(summary: &[SummaryRow], mode: Mode) {
    let mut datasets: Vec<&str> = summary.iter().map(|s| s.dataset.as_str()).collect();
    datasets.sort_unstable();
    datasets.dedup();

    let heading = match mode {
        Mode::Plasticity => "plasticity (whole-dataset fit)",
        Mode::Generalization => "generalization (nested cross-validation)",
    };
    println!("AUC summary, {heading}");
    let columns = [
        ("OC-SVM", AlgorithmKind::Ocsvm, '+'),
        ("SVDD", AlgorithmKind::Svdd, '+'),
        ("SVE(+)", AlgorithmKind::Sve, '+'),
        ("ESVDD(+)", AlgorithmKind::Esvdd, '+'),
        ("SVE(-)", AlgorithmKind::Sve, '-'),
        ("ESVDD(-)", AlgorithmKind::Esvdd, '-'),
    ];
    let present: Vec<_> = columns
        .iter()
        .filter(|(_, algo, tag)| {
            summary
                .iter()
                .any(|s| s.algorithm == *algo && s.tag == *tag)
        })
        .collect();
    print!("{:<16}", "dataset");
    for (name, _, _) in &present {
        print!("{name:<16}");
    }
    println!();
    for dataset in datasets {
        print!("{dataset:<16}");
        for (_, algo, tag) in &present {
            let cell = summary
                .iter()
                .find(|s| s.dataset == dataset && s.algorithm == *algo && s.tag == *tag);
            match cell {
                Some(s) => print!("{:<16}", format!("{:.2} ± {:.0e}", s.auc_mean, s.auc_std)),
                None => print!("{:<16}", "-"),
            }
        }
        println!();
    }
}

/// Print client sizes (and centroids for the biased scheme) and dump the
/// partition JSON under `<out>/partitions/`.
pub fn cmd_inspect_partition(
    dataset_path: &Path,
    k: usize,
    scheme: Scheme,
    seed: u64,
    out_dir: &Path,
) -> Result<(), CliError> {
    let raw = load_dataset(dataset_path, DatasetFormat::CsvLabeled)?;
    let (data, _) = minmax_normalize(&raw, &[])?;
    let partition = match scheme {
        Scheme::Iid => iid_partition(data.len(), k, seed)?,
        Scheme::Biased => biased_partition(data.features(), k, seed)?,
    };

    println!("dataset {} ({} rows), scheme {scheme}, k = {k}, seed = {seed}", data.name(), data.len());
    for (client, size) in partition.client_sizes().iter().enumerate() {
        println!("client {client}: {size} points");
    }
    if scheme == Scheme::Biased {
        let clustering = kmeans(data.features(), k, seed, 100, 1e-4)?;
        for (client, centroid) in clustering.centroids.iter_rows().enumerate() {
            let coords: Vec<String> = centroid.iter().map(|v| format!("{v:.4}")).collect();
            println!("centroid {client}: [{}]", coords.join(", "));
        }
    }

    let dir = out_dir.join("partitions");
    std::fs::create_dir_all(&dir)?;
    let file = dir.join(format!(
        "partition_{}_{scheme}_k{k}_seed{seed}.json",
        data.name()
    ));
    let mut json = serde_json::to_string_pretty(&partition)
        .map_err(|e| CliError::Config(format!("partition serialization failed: {e}")))?;
    json.push('\n');
    std::fs::write(&file, json)?;
    println!("wrote {}", file.display());
    Ok(())
}

/// Generate a synthetic benchmark CSV in the ingestion format.
pub fn cmd_generate_data(
    n_normal: usize,
    n_anomaly: usize,
    dimensions: usize,
    seed: u64,
    out_file: &Path,
) -> Result<(), CliError> {
    let data = generate_synthetic_benchmark(n_normal, n_anomaly, dimensions, seed)?;
    if let Some(parent) = out_file.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut out = String::new();
    for (row, label) in data.features().iter_rows().zip(data.labels()) {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&cells.join(","));
        out.push(',');
        out.push_str(&label.to_string());
        out.push('\n');
    }
    std::fs::write(out_file, out)?;
    println!(
        "wrote {} ({} rows, {} anomalies)",
        out_file.display(),
        data.len(),
        data.count(fedsvdd::data::Label::Anomaly)
    );
    Ok(())
}

