//! Report assembly: aggregated rows, per-run detail, paired-difference
//! aggregation and best/worst summaries, with CSV and JSON emission.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Scheme;
use crate::error::{Error, Result};

use super::experiment::AlgorithmKind;

/// One aggregated cell of the experiment grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub dataset: String,
    pub algorithm: AlgorithmKind,
    pub k: usize,
    pub f: f64,
    pub scheme: Scheme,
    pub anonymise: bool,
    pub auc_mean: f64,
    pub auc_std: f64,
    pub n_runs: usize,
}

/// One run inside a cell; `auc` is absent when the run failed and `error`
/// carries the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDetail {
    pub dataset: String,
    pub algorithm: AlgorithmKind,
    pub k: usize,
    pub f: f64,
    pub scheme: Scheme,
    pub anonymise: bool,
    pub seed: u64,
    pub sample_index: usize,
    pub hyper_value: f64,
    pub auc: Option<f64>,
    pub error: Option<String>,
}

/// Aggregated rows plus full per-run detail.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub runs: Vec<RunDetail>,
}

impl ExperimentReport {
    pub fn merge(&mut self, other: ExperimentReport) {
        self.rows.extend(other.rows);
        self.runs.extend(other.runs);
    }
}

pub const REPORT_CSV_HEADER: &str =
    "dataset,algorithm,k,f,scheme,anonymise,auc_mean,auc_std,n_runs";

/// Write the aggregated rows as CSV (fixed header, one row per cell).
pub fn write_report_csv(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.dataset, r.algorithm, r.k, r.f, r.scheme, r.anonymise, r.auc_mean, r.auc_std, r.n_runs
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Parse a CSV produced by `write_report_csv`; the round trip is lossless.
pub fn parse_report_csv(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let display = path.as_ref().display().to_string();
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut lines = text.lines().enumerate();
    let parse_err = |row: usize, column: usize, message: String| Error::Parse {
        path: display.clone(),
        row,
        column,
        message,
    };
    match lines.next() {
        Some((_, header)) if header == REPORT_CSV_HEADER => {}
        _ => return Err(parse_err(1, 1, "missing or unexpected header".into())),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row_no = idx + 1;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 9 {
            return Err(parse_err(row_no, cells.len(), "expected 9 columns".into()));
        }
        let field = |col: usize, what: &str| -> Result<&str> {
            cells
                .get(col)
                .copied()
                .ok_or_else(|| parse_err(row_no, col + 1, format!("missing {what}")))
        };
        let parse_f64 = |col: usize| -> Result<f64> {
            field(col, "number")?
                .parse()
                .map_err(|_| parse_err(row_no, col + 1, "expected a number".into()))
        };
        rows.push(ReportRow {
            dataset: field(0, "dataset")?.to_string(),
            algorithm: AlgorithmKind::from_str(field(1, "algorithm")?)?,
            k: field(2, "k")?
                .parse()
                .map_err(|_| parse_err(row_no, 3, "expected an integer".into()))?,
            f: parse_f64(3)?,
            scheme: Scheme::from_str(field(4, "scheme")?)?,
            anonymise: field(5, "anonymise")?
                .parse()
                .map_err(|_| parse_err(row_no, 6, "expected true/false".into()))?,
            auc_mean: parse_f64(6)?,
            auc_std: parse_f64(7)?,
            n_runs: field(8, "n_runs")?
                .parse()
                .map_err(|_| parse_err(row_no, 9, "expected an integer".into()))?,
        });
    }
    Ok(rows)
}

/// Write rows plus per-run detail as JSON.
pub fn write_detail_json(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    let mut json = serde_json::to_string_pretty(report).map_err(|e| {
        Error::InvalidParameter(format!("report serialization failed: {e}"))
    })?;
    json.push('\n');
    std::fs::write(path, json)?;
    Ok(())
}

/// The three paired contrasts of the difference charts. Positive values
/// favor the first-named arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContrastAxis {
    /// iid minus biased.
    SplitBias,
    /// full fraction (f = 1) minus half fraction (f = 0.5).
    ClientFraction,
    /// raw minus anonymised.
    Anonymisation,
}

impl fmt::Display for ContrastAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContrastAxis::SplitBias => "split_bias",
            ContrastAxis::ClientFraction => "client_fraction",
            ContrastAxis::Anonymisation => "anonymisation",
        })
    }
}

impl FromStr for ContrastAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split_bias" => Ok(ContrastAxis::SplitBias),
            "client_fraction" => Ok(ContrastAxis::ClientFraction),
            "anonymisation" => Ok(ContrastAxis::Anonymisation),
            other => Err(Error::InvalidParameter(format!(
                "unknown contrast axis {other:?}"
            ))),
        }
    }
}

/// Mean and spread of paired AUC differences in one contrast cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceRow {
    pub dataset: String,
    pub algorithm: AlgorithmKind,
    pub k: usize,
    /// Client fraction; absent when f is the contrasted axis.
    pub f: Option<f64>,
    /// Split scheme; absent when the scheme is the contrasted axis.
    pub scheme: Option<Scheme>,
    pub mean_diff: f64,
    pub std_diff: f64,
    pub n_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct CellKey {
    dataset: String,
    algorithm: String,
    k: usize,
    f_bits: Option<u64>,
    scheme: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct PairKey {
    cell: CellKey,
    /// Anonymisation stratum: runs pair within it, cells pool across it
    /// (the charts show one point per cell, not per stratum).
    stratum: Option<bool>,
    seed: u64,
    sample_index: usize,
}

/// Aggregate paired AUC differences along one axis. Runs pair on every
/// coordinate except the contrasted one (the shared seed derivation keeps
/// the arms aligned). A cell present in one arm but absent in the other is
/// an incomplete contrast.
pub fn aggregate_differences(
    report: &ExperimentReport,
    axis: ContrastAxis,
) -> Result<Vec<DifferenceRow>> {
    // Arm predicate and the pair key that strips the contrasted axis.
    let arm_of = |run: &RunDetail| -> Option<bool> {
        if !run.algorithm.is_federated() {
            return None;
        }
        match axis {
            ContrastAxis::SplitBias => Some(run.scheme == Scheme::Iid),
            ContrastAxis::ClientFraction => {
                if run.f == 1.0 {
                    Some(true)
                } else if run.f == 0.5 {
                    Some(false)
                } else {
                    None
                }
            }
            ContrastAxis::Anonymisation => Some(!run.anonymise),
        }
    };
    let key_of = |run: &RunDetail| CellKey {
        dataset: run.dataset.clone(),
        algorithm: run.algorithm.to_string(),
        k: run.k,
        f_bits: (axis != ContrastAxis::ClientFraction).then(|| run.f.to_bits()),
        scheme: (axis != ContrastAxis::SplitBias).then(|| run.scheme.to_string()),
    };

    let mut first: BTreeMap<PairKey, f64> = BTreeMap::new();
    let mut second: BTreeMap<PairKey, f64> = BTreeMap::new();
    let mut first_cells: BTreeMap<CellKey, ()> = BTreeMap::new();
    let mut second_cells: BTreeMap<CellKey, ()> = BTreeMap::new();
    for run in &report.runs {
        let Some(arm) = arm_of(run) else { continue };
        let cell = key_of(run);
        let pair = PairKey {
            cell: cell.clone(),
            stratum: (axis != ContrastAxis::Anonymisation).then_some(run.anonymise),
            seed: run.seed,
            sample_index: run.sample_index,
        };
        let (values, cells) = if arm {
            (&mut first, &mut first_cells)
        } else {
            (&mut second, &mut second_cells)
        };
        cells.insert(cell, ());
        if let Some(aucv) = run.auc {
            values.insert(pair, aucv);
        }
    }

    let mut missing: Vec<String> = Vec::new();
    for cell in first_cells.keys() {
        if !second_cells.contains_key(cell) {
            missing.push(format!("{cell:?} lacks the second arm"));
        }
    }
    for cell in second_cells.keys() {
        if !first_cells.contains_key(cell) {
            missing.push(format!("{cell:?} lacks the first arm"));
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteContrast { missing });
    }

    let mut diffs: BTreeMap<CellKey, Vec<f64>> = BTreeMap::new();
    for (pair, a) in &first {
        if let Some(b) = second.get(pair) {
            diffs.entry(pair.cell.clone()).or_default().push(a - b);
        }
    }

    let mut out = Vec::new();
    for (cell, values) in diffs {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        out.push(DifferenceRow {
            dataset: cell.dataset,
            algorithm: AlgorithmKind::from_str(&cell.algorithm)?,
            k: cell.k,
            f: cell.f_bits.map(f64::from_bits),
            scheme: cell.scheme.as_deref().map(Scheme::from_str).transpose()?,
            mean_diff: mean,
            std_diff: var.sqrt(),
            n_pairs: n,
        });
    }
    Ok(out)
}

/// Write difference rows as a plottable CSV.
pub fn write_difference_csv(rows: &[DifferenceRow], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("dataset,algorithm,k,f,scheme,mean_diff,std_diff,n_pairs\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.dataset,
            r.algorithm,
            r.k,
            r.f.map(|v| v.to_string()).unwrap_or_default(),
            r.scheme.map(|s| s.to_string()).unwrap_or_default(),
            r.mean_diff,
            r.std_diff,
            r.n_pairs
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Best or worst configuration of one algorithm on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub algorithm: AlgorithmKind,
    /// "+" marks the best configuration, "-" the worst.
    pub tag: char,
    pub k: usize,
    pub f: f64,
    pub scheme: Scheme,
    pub anonymise: bool,
    pub auc_mean: f64,
    pub auc_std: f64,
}

/// Per (dataset, algorithm), the configurations with maximal and minimal
/// mean AUC. Ties prefer the smaller standard deviation, then the
/// lexicographically first configuration.
pub fn best_worst_summary(report: &ExperimentReport) -> Vec<SummaryRow> {
    let config_order = |r: &ReportRow| (r.k, r.f.to_bits(), r.scheme.to_string(), r.anonymise);
    let mut groups: BTreeMap<(String, String), Vec<&ReportRow>> = BTreeMap::new();
    for row in &report.rows {
        groups
            .entry((row.dataset.clone(), row.algorithm.to_string()))
            .or_default()
            .push(row);
    }
    let mut out = Vec::new();
    for rows in groups.values() {
        let best = rows
            .iter()
            .min_by(|a, b| {
                b.auc_mean
                    .total_cmp(&a.auc_mean)
                    .then(a.auc_std.total_cmp(&b.auc_std))
                    .then(config_order(a).cmp(&config_order(b)))
            })
            .expect("group is non-empty");
        let worst = rows
            .iter()
            .min_by(|a, b| {
                a.auc_mean
                    .total_cmp(&b.auc_mean)
                    .then(a.auc_std.total_cmp(&b.auc_std))
                    .then(config_order(a).cmp(&config_order(b)))
            })
            .expect("group is non-empty");
        for (tag, row) in [('+', best), ('-', worst)] {
            out.push(SummaryRow {
                dataset: row.dataset.clone(),
                algorithm: row.algorithm,
                tag,
                k: row.k,
                f: row.f,
                scheme: row.scheme,
                anonymise: row.anonymise,
                auc_mean: row.auc_mean,
                auc_std: row.auc_std,
            });
        }
    }
    out
}
