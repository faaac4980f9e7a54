//! Random over- and under-sampling toward a target minority/majority ratio.

use rand::Rng;

use ndarray::Array2;

use crate::data::Dataset;
use crate::error::{Error, Result};

fn check_ratio(ratio: f64) -> Result<()> {
    if !(ratio.is_finite() && ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::config(format!(
            "target class ratio must be in (0, 1], got {ratio}"
        )));
    }
    Ok(())
}

/// Duplicate uniformly chosen minority rows until
/// `N_min = round(ratio * N_maj)`.
///
/// A ratio at or below the current one adds nothing; duplicates are flagged
/// as synthetic rows.
pub fn random_oversample(train: &Dataset, ratio: f64, rng: &mut impl Rng) -> Result<Dataset> {
    check_ratio(ratio)?;
    let minority = train.minority_indices();
    if minority.is_empty() {
        return Err(Error::data("cannot oversample without minority rows"));
    }
    let target = (ratio * train.n_majority() as f64).round() as usize;
    let n_new = target.saturating_sub(minority.len());
    let mut rows = Array2::zeros((n_new, train.dim()));
    for i in 0..n_new {
        let pick = minority[rng.gen_range(0..minority.len())];
        rows.row_mut(i).assign(&train.row(pick));
    }
    train.append_minority_rows(rows.view())
}

/// Drop uniformly chosen majority rows until
/// `N_maj = round(N_min / ratio)`, keeping original row order.
///
/// A ratio at or below the current one removes nothing.
pub fn random_undersample(train: &Dataset, ratio: f64, rng: &mut impl Rng) -> Result<Dataset> {
    check_ratio(ratio)?;
    let majority = train.majority_indices();
    let n_min = train.n_minority();
    if n_min == 0 {
        return Err(Error::data("cannot undersample without minority rows"));
    }
    let target = ((n_min as f64 / ratio).round() as usize).min(majority.len());
    if target == 0 {
        return Err(Error::data(
            "target ratio would remove every majority row",
        ));
    }
    if target == majority.len() {
        return Ok(train.clone());
    }
    let chosen = rand::seq::index::sample(rng, majority.len(), target);
    let mut keep: Vec<usize> = chosen.iter().map(|i| majority[i]).collect();
    keep.extend(train.minority_indices());
    keep.sort_unstable();
    train.select(&keep)
}
