//! CSV ingestion: parse an RFC-4180 file with a header row into a raw
//! column-major table with the rarer label value mapped to 1.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{MAJORITY, MINORITY};
use crate::error::{Error, Result};

/// Values that are treated as missing cells, after trimming.
const MISSING_TOKENS: [&str; 4] = ["", "?", "na", "nan"];

/// Optional per-column type overrides for ingestion.
///
/// Columns not named in either list have their type inferred: numeric if
/// every non-missing cell parses as a float, categorical otherwise.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SchemaHints {
    #[serde(default)]
    pub numeric: Vec<String>,
    #[serde(default)]
    pub categorical: Vec<String>,
}

impl SchemaHints {
    pub fn is_empty(&self) -> bool {
        self.numeric.is_empty() && self.categorical.is_empty()
    }
}

/// Parsed CSV contents before preprocessing.
///
/// Feature cells stay as raw strings (`None` marks a missing value) so that
/// column typing and encoding can be decided against training rows only.
/// Labels are already remapped: the rarer original value is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub column_names: Vec<String>,
    /// Column-major feature cells; `columns[c][r]` is row `r` of column `c`.
    pub columns: Vec<Vec<Option<String>>>,
    pub labels: Vec<u8>,
    /// Original label values as `[majority, minority]`.
    pub label_names: [String; 2],
    pub hints: SchemaHints,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn minority_indices(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == MINORITY)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn n_majority(&self) -> usize {
        self.labels.iter().filter(|&&l| l == MAJORITY).count()
    }

    pub fn n_minority(&self) -> usize {
        self.labels.iter().filter(|&&l| l == MINORITY).count()
    }

    /// Copy out the rows at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<RawTable> {
        let mut columns = vec![Vec::with_capacity(indices.len()); self.columns.len()];
        let mut labels = Vec::with_capacity(indices.len());
        for &idx in indices {
            if idx >= self.n_rows() {
                return Err(Error::data(format!("row index {idx} out of range")));
            }
            for (c, col) in self.columns.iter().enumerate() {
                columns[c].push(col[idx].clone());
            }
            labels.push(self.labels[idx]);
        }
        Ok(RawTable {
            column_names: self.column_names.clone(),
            columns,
            labels,
            label_names: self.label_names.clone(),
            hints: self.hints.clone(),
        })
    }
}

fn normalize_cell(raw: &str) -> Option<String> {
    let trimmed = raw.trim();
    if MISSING_TOKENS.contains(&trimmed.to_ascii_lowercase().as_str()) {
        None
    } else {
        Some(trimmed.to_string())
    }
}

/// Load a CSV file from disk. See [`load_csv_from_reader`].
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    hints: Option<SchemaHints>,
) -> Result<RawTable> {
    let path = path.as_ref();
    let file = File::open(path)
        .map_err(|e| Error::data(format!("cannot open {}: {e}", path.display())))?;
    load_csv_from_reader(file, label_column, hints)
}

/// Parse CSV bytes with a header row into a [`RawTable`].
///
/// The label column must exist, contain no missing cells, and take exactly
/// two distinct values; the rarer value becomes label 1. When both values
/// are equally frequent, the lexicographically greater one becomes 1 so the
/// mapping stays deterministic.
pub fn load_csv_from_reader(
    reader: impl Read,
    label_column: &str,
    hints: Option<SchemaHints>,
) -> Result<RawTable> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::None)
        .from_reader(reader);

    let headers = csv_reader
        .headers()
        .map_err(|e| Error::data(format!("cannot read CSV header: {e}")))?
        .clone();
    let label_pos = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::data(format!("label column {label_column:?} not found in header")))?;

    let column_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_pos)
        .map(|(_, h)| h.to_string())
        .collect();
    if column_names.is_empty() {
        return Err(Error::data("CSV has no feature columns besides the label"));
    }
    {
        let mut seen = std::collections::BTreeSet::new();
        for name in headers.iter() {
            if !seen.insert(name) {
                return Err(Error::data(format!("duplicate column name {name:?}")));
            }
        }
    }

    let mut columns: Vec<Vec<Option<String>>> = vec![Vec::new(); column_names.len()];
    let mut raw_labels: Vec<String> = Vec::new();
    for (row_idx, record) in csv_reader.records().enumerate() {
        let record = record.map_err(|e| Error::data(format!("CSV parse error: {e}")))?;
        if record.len() != headers.len() {
            return Err(Error::data(format!(
                "row {} has {} fields, expected {}",
                row_idx + 1,
                record.len(),
                headers.len()
            )));
        }
        let mut col = 0;
        for (field_idx, field) in record.iter().enumerate() {
            if field_idx == label_pos {
                match normalize_cell(field) {
                    Some(v) => raw_labels.push(v),
                    None => {
                        return Err(Error::data(format!(
                            "missing label value at data row {}",
                            row_idx + 1
                        )))
                    }
                }
            } else {
                columns[col].push(normalize_cell(field));
                col += 1;
            }
        }
    }
    if raw_labels.is_empty() {
        return Err(Error::data("CSV contains no data rows"));
    }

    // Count label values and map the rarer one to 1.
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in &raw_labels {
        *counts.entry(l.as_str()).or_insert(0) += 1;
    }
    if counts.len() != 2 {
        return Err(Error::data(format!(
            "label column must take exactly 2 distinct values, found {}",
            counts.len()
        )));
    }
    let mut entries: Vec<(&str, usize)> = counts.into_iter().collect();
    // Sort by (count, value): the first entry is the minority. The value
    // ordering only matters for exact ties, where the lexicographically
    // greater value becomes the minority.
    entries.sort_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(a.0)));
    let minority_value = entries[0].0.to_string();
    let majority_value = entries[1].0.to_string();

    let labels: Vec<u8> = raw_labels
        .iter()
        .map(|l| {
            if *l == minority_value {
                MINORITY
            } else {
                MAJORITY
            }
        })
        .collect();

    let hints = hints.unwrap_or_default();
    for name in hints.numeric.iter().chain(hints.categorical.iter()) {
        if !column_names.iter().any(|c| c == name) {
            return Err(Error::config(format!(
                "schema hint references unknown column {name:?}"
            )));
        }
    }
    if let Some(dup) = hints
        .numeric
        .iter()
        .find(|n| hints.categorical.contains(n))
    {
        return Err(Error::config(format!(
            "column {dup:?} hinted as both numeric and categorical"
        )));
    }

    Ok(RawTable {
        column_names,
        columns,
        labels,
        label_names: [majority_value, minority_value],
        hints,
    })
}
