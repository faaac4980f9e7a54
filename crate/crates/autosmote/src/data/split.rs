//! Seeded stratified splitting into train/validation/test parts.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::data::{Dataset, SplitDataset};
use crate::error::{Error, Result};

/// Row-index view of a three-way split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl Partition {
    pub fn total(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }
}

/// Per-class part sizes: fractions are rounded to the nearest row, then
/// adjusted so that every part keeps at least one row.
fn part_sizes(n: usize, fractions: (f64, f64, f64)) -> (usize, usize, usize) {
    let mut n_train = ((fractions.0 * n as f64).round() as usize).max(1);
    let mut n_val = ((fractions.1 * n as f64).round() as usize).max(1);
    while n_train + n_val > n - 1 {
        if n_train >= n_val && n_train > 1 {
            n_train -= 1;
        } else {
            n_val -= 1;
        }
    }
    (n_train, n_val, n - n_train - n_val)
}

/// Split row indices stratified by class.
///
/// Every class is shuffled independently and dealt into the three parts, so
/// class proportions survive the split up to rounding. Each class must have
/// at least 3 rows (one per part). Within each part, indices come back in
/// ascending order, which makes downstream behavior independent of the
/// shuffle's internal ordering.
pub fn stratified_partition(
    labels: &[u8],
    fractions: (f64, f64, f64),
    rng: &mut impl Rng,
) -> Result<Partition> {
    let (f_train, f_val, f_test) = fractions;
    for f in [f_train, f_val, f_test] {
        if !f.is_finite() || f <= 0.0 {
            return Err(Error::config(format!(
                "split fractions must be positive, got {fractions:?}"
            )));
        }
    }
    if (f_train + f_val + f_test - 1.0).abs() > 1e-9 {
        return Err(Error::config(format!(
            "split fractions must sum to 1, got {fractions:?}"
        )));
    }

    let mut partition = Partition {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
    };
    // Classes are processed in label order (0 then 1) for determinism.
    for class in [0u8, 1u8] {
        let mut rows: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        if rows.is_empty() {
            return Err(Error::data(format!("class {class} has no rows")));
        }
        if rows.len() < 3 {
            return Err(Error::data(format!(
                "class {class} has only {} rows; at least 3 are required to \
                 cover train, validation, and test",
                rows.len()
            )));
        }
        rows.shuffle(rng);
        let (n_train, n_val, _) = part_sizes(rows.len(), fractions);
        partition.train.extend(&rows[..n_train]);
        partition.validation.extend(&rows[n_train..n_train + n_val]);
        partition.test.extend(&rows[n_train + n_val..]);
    }
    partition.train.sort_unstable();
    partition.validation.sort_unstable();
    partition.test.sort_unstable();
    Ok(partition)
}

/// Split an encoded dataset into stratified train/validation/test parts.
pub fn split(
    ds: &Dataset,
    fractions: (f64, f64, f64),
    rng: &mut impl Rng,
) -> Result<SplitDataset> {
    let partition = stratified_partition(ds.labels(), fractions, rng)?;
    Ok(SplitDataset {
        train: ds.select(&partition.train)?,
        validation: ds.select(&partition.validation)?,
        test: ds.select(&partition.test)?,
    })
}
