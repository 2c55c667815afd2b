//! Dataset ingestion, normalization, partitioning and folds.

mod folds;
mod kmeans;
mod partition;
mod synthetic;

pub use folds::stratified_kfold;
pub use kmeans::{kmeans, KMeansResult};
pub use partition::{biased_partition, iid_partition, Partition, Scheme};
pub use synthetic::{generate_synthetic_benchmark, synthetic_benchmark_centers};

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Ground-truth label of an observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Normal,
    Anomaly,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Normal => "normal",
            Label::Anomaly => "anomaly",
        })
    }
}

/// Feature matrix with labels; the unit every experiment operates on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<Label>,
    name: String,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<Label>, name: impl Into<String>) -> Result<Self> {
        if features.n_rows() == 0 || features.n_cols() == 0 {
            return Err(Error::InvalidParameter(
                "dataset must have n >= 1 rows and d >= 1 features".into(),
            ));
        }
        if labels.len() != features.n_rows() {
            return Err(Error::InvalidParameter(format!(
                "label count {} does not match row count {}",
                labels.len(),
                features.n_rows()
            )));
        }
        Ok(Dataset {
            features,
            labels,
            name: name.into(),
        })
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.features.n_rows()
    }

    pub fn is_empty(&self) -> bool {
        self.features.n_rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.n_cols()
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn indices_of(&self, label: Label) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == label).collect()
    }

    /// Sub-dataset holding the given rows, order preserved.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            name: self.name.clone(),
        }
    }
}

/// Accepted on-disk layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    /// d numeric columns followed by one label column
    /// ("normal"/"anomaly", case-insensitive; "n"/"o" accepted as aliases).
    CsvLabeled,
}

/// Parse a labeled CSV file; row order is preserved.
pub fn load_dataset(path: impl AsRef<Path>, format: DatasetFormat) -> Result<Dataset> {
    let DatasetFormat::CsvLabeled = format;
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let parse_err = |row: usize, column: usize, message: String| Error::Parse {
        path: display.clone(),
        row,
        column,
        message,
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut expected_cols = None;
    for (line_idx, line) in text.lines().enumerate() {
        let row_no = line_idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() < 2 {
            return Err(parse_err(
                row_no,
                1,
                "expected at least one feature column and a label column".into(),
            ));
        }
        match expected_cols {
            None => expected_cols = Some(cells.len()),
            Some(n) if n != cells.len() => {
                return Err(parse_err(
                    row_no,
                    cells.len().min(n) + 1,
                    format!("ragged row: expected {} columns, found {}", n, cells.len()),
                ));
            }
            _ => {}
        }
        let mut features = Vec::with_capacity(cells.len() - 1);
        for (col_idx, cell) in cells[..cells.len() - 1].iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| {
                parse_err(
                    row_no,
                    col_idx + 1,
                    format!("expected a numeric feature value, found {cell:?}"),
                )
            })?;
            features.push(value);
        }
        let label_cell = cells[cells.len() - 1];
        let label = match label_cell.to_ascii_lowercase().as_str() {
            "normal" | "n" => Label::Normal,
            "anomaly" | "o" => Label::Anomaly,
            other => {
                return Err(parse_err(
                    row_no,
                    cells.len(),
                    format!("unknown label token {other:?}"),
                ))
            }
        };
        rows.push(features);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(parse_err(0, 0, "file contains no data rows".into()));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| display.clone());
    Dataset::new(Matrix::from_rows(&rows)?, labels, name)
}

/// Per-feature ranges fitted on one split and applied to any number of others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanges {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl FeatureRanges {
    pub fn fit(data: &Matrix) -> Self {
        let (min, max) = data.column_ranges();
        FeatureRanges { min, max }
    }

    /// (x - min) / (max - min); constant features map to 0. Values outside
    /// [0, 1] are permitted on splits the range was not fitted on.
    pub fn apply(&self, data: &Matrix) -> Result<Matrix> {
        if data.n_cols() != self.min.len() {
            return Err(Error::DimensionMismatch {
                expected: self.min.len(),
                found: data.n_cols(),
            });
        }
        let mut rows = Vec::with_capacity(data.n_rows());
        for row in data.iter_rows() {
            rows.push(
                row.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let span = self.max[j] - self.min[j];
                        if span > 0.0 {
                            (v - self.min[j]) / span
                        } else {
                            0.0
                        }
                    })
                    .collect::<Vec<f64>>(),
            );
        }
        Matrix::from_rows(&rows)
    }

    pub fn apply_dataset(&self, data: &Dataset) -> Result<Dataset> {
        Dataset::new(
            self.apply(data.features())?,
            data.labels().to_vec(),
            data.name(),
        )
    }
}

/// Fit min-max ranges on `train` and rescale it together with `others`.
pub fn minmax_normalize(train: &Dataset, others: &[&Dataset]) -> Result<(Dataset, Vec<Dataset>)> {
    let ranges = FeatureRanges::fit(train.features());
    let train_out = ranges.apply_dataset(train)?;
    let others_out = others
        .iter()
        .map(|d| ranges.apply_dataset(d))
        .collect::<Result<Vec<_>>>()?;
    Ok((train_out, others_out))
}
