//! Stratified cross-validation folds.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::SeedDeriver;

use super::{Dataset, Label};

/// Disjoint stratified test folds covering the dataset; returns
/// (train indices, test indices) per fold, each sorted ascending.
/// Per-fold class counts stay within one point of the ideal proportion.
pub fn stratified_kfold(
    data: &Dataset,
    folds: usize,
    seed: u64,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if folds < 2 {
        return Err(Error::InvalidParameter(format!(
            "fold count must be >= 2, got {folds}"
        )));
    }
    let mut rng = SeedDeriver::new(seed).mix_str("stratified-kfold").rng();
    let mut test_sets: Vec<Vec<usize>> = vec![Vec::new(); folds];
    for class in [Label::Normal, Label::Anomaly] {
        let mut members = data.indices_of(class);
        if members.is_empty() {
            continue;
        }
        if members.len() < folds {
            return Err(Error::ClassSmallerThanFolds {
                class: class.to_string(),
                size: members.len(),
                folds,
            });
        }
        members.shuffle(&mut rng);
        for (pos, idx) in members.into_iter().enumerate() {
            test_sets[pos % folds].push(idx);
        }
    }

    let n = data.len();
    let mut out = Vec::with_capacity(folds);
    for f in 0..folds {
        let mut test = test_sets[f].clone();
        test.sort_unstable();
        let in_test: Vec<bool> = {
            let mut mask = vec![false; n];
            for &i in &test {
                mask[i] = true;
            }
            mask
        };
        let train: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
        out.push((train, test));
    }
    Ok(out)
}
