//! AUC computation and the experiment harness.

mod experiment;
mod report;

pub use experiment::{
    run_generalization_experiment, run_plasticity_experiment, AlgorithmKind, ExperimentConfig,
    GeneralizationSettings,
};
pub use report::{
    aggregate_differences, best_worst_summary, parse_report_csv, write_detail_json,
    write_difference_csv, write_report_csv, ContrastAxis, DifferenceRow, ExperimentReport,
    ReportRow, RunDetail, SummaryRow,
};

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{Error, Result};

/// Area under the ROC curve of the outlierness ranking, ties counted half.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AucResult {
    pub auc: f64,
    pub n_positive: usize,
    pub n_negative: usize,
}

/// Probability that a uniformly random anomaly receives a lower inlier
/// score than a uniformly random normal (Mann-Whitney statistic). Anomaly
/// is the positive class; outlierness is the negated score.
pub fn auc(scores: &[f64], labels: &[Label]) -> Result<AucResult> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidParameter(format!(
            "scores ({}) and labels ({}) must have equal length",
            scores.len(),
            labels.len()
        )));
    }
    let n_positive = labels.iter().filter(|&&l| l == Label::Anomaly).count();
    let n_negative = labels.len() - n_positive;
    if n_positive == 0 || n_negative == 0 {
        return Err(Error::UndefinedAuc);
    }

    // Rank outlierness ascending with average ranks over ties.
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| (-scores[a]).total_cmp(&-scores[b]));
    let mut positive_rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && -scores[order[end + 1]] == -scores[order[start]] {
            end += 1;
        }
        // 1-based ranks start..=end share the average rank.
        let rank = (start + 1 + end + 1) as f64 / 2.0;
        for &idx in &order[start..=end] {
            if labels[idx] == Label::Anomaly {
                positive_rank_sum += rank;
            }
        }
        start = end + 1;
    }

    let np = n_positive as f64;
    let u = positive_rank_sum - np * (np + 1.0) / 2.0;
    Ok(AucResult {
        auc: u / (np * n_negative as f64),
        n_positive,
        n_negative,
    })
}
