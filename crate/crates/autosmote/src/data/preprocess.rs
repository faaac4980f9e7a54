//! Column typing, standardization, imputation, and one-hot encoding.
//!
//! Statistics (means, standard deviations, category vocabularies) are fitted
//! against an explicit row subset — the training rows — and then applied to
//! any rows of the same table, so validation and test never influence the
//! encoding. Column *types* are resolved from the whole column (a purely
//! syntactic property), with hints taking precedence over inference.

use serde::{Deserialize, Serialize};

use ndarray::Array2;

use crate::data::{Dataset, Partition, RawTable, SplitDataset};
use crate::error::{Error, Result};

/// Encoding rule for one source column.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ColumnSpec {
    /// Standardize with the fitted mean and population standard deviation;
    /// missing values become 0 (the post-standardization mean).
    Numeric { mean: f64, std: f64 },
    /// One-hot encode over the fitted vocabulary (sorted, deduplicated);
    /// missing or unseen values become all-zero rows.
    Categorical { vocabulary: Vec<String> },
}

/// Fitted encoding for every column of a [`RawTable`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PreprocessSpec {
    /// One entry per source column, in source order.
    pub columns: Vec<(String, ColumnSpec)>,
}

/// Counters for degraded cells seen during a transform.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TransformStats {
    /// Non-missing categorical values absent from the fitted vocabulary
    /// (encoded as all zeros).
    pub unseen_categories: usize,
    /// Cells in numeric columns that did not parse as finite numbers
    /// (imputed like missing values).
    pub unparseable_numeric: usize,
}

impl TransformStats {
    fn merge(&mut self, other: TransformStats) {
        self.unseen_categories += other.unseen_categories;
        self.unparseable_numeric += other.unparseable_numeric;
    }
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Numeric,
    Categorical,
}

fn resolve_column_kind(raw: &RawTable, col: usize) -> ColumnKind {
    let name = &raw.column_names[col];
    if raw.hints.numeric.iter().any(|n| n == name) {
        return ColumnKind::Numeric;
    }
    if raw.hints.categorical.iter().any(|n| n == name) {
        return ColumnKind::Categorical;
    }
    let all_numeric = raw.columns[col]
        .iter()
        .flatten()
        .all(|cell| parse_number(cell).is_some());
    if all_numeric {
        ColumnKind::Numeric
    } else {
        ColumnKind::Categorical
    }
}

impl PreprocessSpec {
    /// Fit encoding statistics using only the rows in `fit_rows`.
    pub fn fit(raw: &RawTable, fit_rows: &[usize]) -> Result<PreprocessSpec> {
        if fit_rows.is_empty() {
            return Err(Error::data("cannot fit preprocessing on zero rows"));
        }
        if let Some(&bad) = fit_rows.iter().find(|&&r| r >= raw.n_rows()) {
            return Err(Error::data(format!("fit row index {bad} out of range")));
        }
        let mut columns = Vec::with_capacity(raw.n_columns());
        for c in 0..raw.n_columns() {
            let name = raw.column_names[c].clone();
            let spec = match resolve_column_kind(raw, c) {
                ColumnKind::Numeric => {
                    let observed: Vec<f64> = fit_rows
                        .iter()
                        .filter_map(|&r| raw.columns[c][r].as_deref())
                        .filter_map(parse_number)
                        .collect();
                    if observed.is_empty() {
                        // No usable values in the fitted rows: standardize to a
                        // constant-zero column.
                        ColumnSpec::Numeric { mean: 0.0, std: 1.0 }
                    } else {
                        let n = observed.len() as f64;
                        let mean = observed.iter().sum::<f64>() / n;
                        let var =
                            observed.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                        let std = var.sqrt();
                        ColumnSpec::Numeric {
                            mean,
                            std: if std > 0.0 { std } else { 1.0 },
                        }
                    }
                }
                ColumnKind::Categorical => {
                    let mut vocabulary: Vec<String> = fit_rows
                        .iter()
                        .filter_map(|&r| raw.columns[c][r].clone())
                        .collect();
                    vocabulary.sort();
                    vocabulary.dedup();
                    ColumnSpec::Categorical { vocabulary }
                }
            };
            columns.push((name, spec));
        }
        Ok(PreprocessSpec { columns })
    }

    /// Width of the encoded feature matrix.
    pub fn output_dim(&self) -> usize {
        self.columns
            .iter()
            .map(|(_, spec)| match spec {
                ColumnSpec::Numeric { .. } => 1,
                ColumnSpec::Categorical { vocabulary } => vocabulary.len(),
            })
            .sum()
    }

    /// Source-column indices encoded as numeric.
    pub fn numeric_columns(&self) -> Vec<usize> {
        self.kind_indices(true)
    }

    /// Source-column indices encoded as categorical.
    pub fn categorical_columns(&self) -> Vec<usize> {
        self.kind_indices(false)
    }

    fn kind_indices(&self, numeric: bool) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, (_, s))| matches!(s, ColumnSpec::Numeric { .. }) == numeric)
            .map(|(i, _)| i)
            .collect()
    }

    /// Encode the given rows of `raw` with the fitted statistics.
    pub fn transform(&self, raw: &RawTable, rows: &[usize]) -> Result<(Dataset, TransformStats)> {
        if self.columns.len() != raw.n_columns() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                got: raw.n_columns(),
            });
        }
        for ((name, _), raw_name) in self.columns.iter().zip(&raw.column_names) {
            if name != raw_name {
                return Err(Error::data(format!(
                    "column name mismatch: fitted {name:?}, table has {raw_name:?}"
                )));
            }
        }
        if let Some(&bad) = rows.iter().find(|&&r| r >= raw.n_rows()) {
            return Err(Error::data(format!("transform row index {bad} out of range")));
        }

        let dim = self.output_dim();
        let mut features = Array2::zeros((rows.len(), dim));
        let mut stats = TransformStats::default();
        let mut labels = Vec::with_capacity(rows.len());

        for (out_row, &r) in rows.iter().enumerate() {
            labels.push(raw.labels[r]);
            let mut offset = 0;
            for (c, (_, spec)) in self.columns.iter().enumerate() {
                match spec {
                    ColumnSpec::Numeric { mean, std } => {
                        let value = match raw.columns[c][r].as_deref() {
                            None => 0.0,
                            Some(cell) => match parse_number(cell) {
                                Some(v) => (v - mean) / std,
                                None => {
                                    stats.unparseable_numeric += 1;
                                    0.0
                                }
                            },
                        };
                        features[[out_row, offset]] = value;
                        offset += 1;
                    }
                    ColumnSpec::Categorical { vocabulary } => {
                        if let Some(cell) = raw.columns[c][r].as_deref() {
                            match vocabulary.binary_search_by(|v| v.as_str().cmp(cell)) {
                                Ok(pos) => features[[out_row, offset + pos]] = 1.0,
                                Err(_) => stats.unseen_categories += 1,
                            }
                        }
                        offset += vocabulary.len();
                    }
                }
            }
        }

        let ds = Dataset::from_parts(features, labels)?
            .with_label_names(raw.label_names.clone());
        Ok((ds, stats))
    }
}

/// Fit on all rows and transform all rows. Intended for data that will not
/// be split afterwards (toy sets, diagnostics).
pub fn preprocess(raw: &RawTable) -> Result<(Dataset, PreprocessSpec, TransformStats)> {
    let all: Vec<usize> = (0..raw.n_rows()).collect();
    let spec = PreprocessSpec::fit(raw, &all)?;
    let (ds, stats) = spec.transform(raw, &all)?;
    Ok((ds, spec, stats))
}

/// Fit on the partition's training rows only, then transform each part.
///
/// This is the leakage-safe composition used by experiment runs: validation
/// and test rows never contribute to means, deviations, or vocabularies.
pub fn preprocess_split(
    raw: &RawTable,
    partition: &Partition,
) -> Result<(SplitDataset, PreprocessSpec, TransformStats)> {
    let spec = PreprocessSpec::fit(raw, &partition.train)?;
    let (train, mut stats) = spec.transform(raw, &partition.train)?;
    let (validation, val_stats) = spec.transform(raw, &partition.validation)?;
    let (test, test_stats) = spec.transform(raw, &partition.test)?;
    stats.merge(val_stats);
    stats.merge(test_stats);
    Ok((
        SplitDataset {
            train,
            validation,
            test,
        },
        spec,
        stats,
    ))
}
