//! Artificial imbalance: subsample the minority class down to a target
//! majority/minority ratio, leaving the majority class untouched.

use rand::Rng;

use crate::data::{Dataset, RawTable, MINORITY};
use crate::error::{Error, Result};

/// Minority count that realizes `target_ir` against `n_majority` rows,
/// rounding down.
fn target_minority_count(n_majority: usize, target_ir: f64) -> usize {
    (n_majority as f64 / target_ir).floor() as usize
}

/// Pick which minority rows to keep, uniformly without replacement.
/// Returns dataset row indices in ascending order, or `None` when the
/// dataset is already at (or above) the target ratio with an exact match.
fn plan_subsample(
    n_majority: usize,
    minority_rows: &[usize],
    target_ir: f64,
    rng: &mut impl Rng,
) -> Result<Option<Vec<usize>>> {
    if !target_ir.is_finite() || target_ir <= 0.0 {
        return Err(Error::config(format!(
            "target imbalance ratio must be positive and finite, got {target_ir}"
        )));
    }
    let n_minority = minority_rows.len();
    if n_minority == 0 {
        return Err(Error::data("dataset has no minority rows"));
    }
    let target = target_minority_count(n_majority, target_ir);
    if target > n_minority {
        return Err(Error::data(format!(
            "target imbalance ratio {target_ir} is below the current ratio \
             ({n_majority}/{n_minority}): would require {target} minority rows"
        )));
    }
    if target == n_minority {
        return Ok(None);
    }
    if target < 2 {
        return Err(Error::data(format!(
            "target imbalance ratio {target_ir} leaves {target} minority rows; \
             at least 2 are required"
        )));
    }
    let chosen = rand::seq::index::sample(rng, n_minority, target);
    let mut keep: Vec<usize> = chosen.iter().map(|i| minority_rows[i]).collect();
    keep.sort_unstable();
    Ok(Some(keep))
}

fn retained_rows(labels: &[u8], kept_minority: &[usize]) -> Vec<usize> {
    let mut keep_flag = vec![false; labels.len()];
    for (i, &l) in labels.iter().enumerate() {
        if l != MINORITY {
            keep_flag[i] = true;
        }
    }
    for &i in kept_minority {
        keep_flag[i] = true;
    }
    (0..labels.len()).filter(|&i| keep_flag[i]).collect()
}

/// Subsample the minority class of an encoded dataset to `target_ir`.
///
/// The majority class and row order are preserved; a target equal to the
/// current ratio returns the dataset unchanged.
pub fn make_imbalanced(ds: &Dataset, target_ir: f64, rng: &mut impl Rng) -> Result<Dataset> {
    match plan_subsample(ds.n_majority(), &ds.minority_indices(), target_ir, rng)? {
        None => Ok(ds.clone()),
        Some(keep) => ds.select(&retained_rows(ds.labels(), &keep)),
    }
}

/// Subsample the minority class of a raw table to `target_ir`.
///
/// Runs before splitting and preprocessing, so the artificial imbalance is a
/// property of the source data rather than of any particular partition.
pub fn subsample_minority_raw(
    raw: &RawTable,
    target_ir: f64,
    rng: &mut impl Rng,
) -> Result<RawTable> {
    match plan_subsample(raw.n_majority(), &raw.minority_indices(), target_ir, rng)? {
        None => Ok(raw.clone()),
        Some(keep) => raw.select(&retained_rows(&raw.labels, &keep)),
    }
}
