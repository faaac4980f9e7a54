//! Dataset representation, CSV ingestion, preprocessing, artificial
//! imbalance construction, and train/validation/test splitting.

mod cache;
mod imbalance;
mod ingest;
mod preprocess;
mod split;

pub use cache::{load_cache, load_cache_from_slice, save_cache};
pub use imbalance::{make_imbalanced, subsample_minority_raw};
pub use ingest::{load_csv, load_csv_from_reader, RawTable, SchemaHints};
pub use preprocess::{preprocess, preprocess_split, ColumnSpec, PreprocessSpec, TransformStats};
pub use split::{split, stratified_partition, Partition};

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Majority label after remapping.
pub const MAJORITY: u8 = 0;
/// Minority label after remapping.
pub const MINORITY: u8 = 1;

/// A fully numeric binary-classification dataset.
///
/// Labels are remapped so that the rarer class is [`MINORITY`] (1).
/// Rows added by resamplers are flagged in `synthetic` for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<u8>,
    synthetic: Vec<bool>,
    label_names: Option<[String; 2]>,
}

impl Dataset {
    /// Build a dataset from already-encoded parts.
    ///
    /// Enforces shape consistency and binary labels; does not require
    /// minority to be the rarer class (resampled data may be balanced).
    pub fn from_parts(features: Array2<f64>, labels: Vec<u8>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.nrows(),
                got: labels.len(),
            });
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::data("labels must be 0 (majority) or 1 (minority)"));
        }
        let synthetic = vec![false; labels.len()];
        Ok(Dataset {
            features,
            labels,
            synthetic,
            label_names: None,
        })
    }

    /// As [`Dataset::from_parts`], with per-row synthetic flags.
    pub fn from_parts_flagged(
        features: Array2<f64>,
        labels: Vec<u8>,
        synthetic: Vec<bool>,
    ) -> Result<Self> {
        let mut ds = Dataset::from_parts(features, labels)?;
        if synthetic.len() != ds.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: ds.labels.len(),
                got: synthetic.len(),
            });
        }
        ds.synthetic = synthetic;
        Ok(ds)
    }

    pub fn with_label_names(mut self, names: [String; 2]) -> Self {
        self.label_names = Some(names);
        self
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn synthetic_flags(&self) -> &[bool] {
        &self.synthetic
    }

    /// Original label values as `[majority, minority]`, when known.
    pub fn label_names(&self) -> Option<&[String; 2]> {
        self.label_names.as_ref()
    }

    pub fn n_majority(&self) -> usize {
        self.labels.iter().filter(|&&l| l == MAJORITY).count()
    }

    pub fn n_minority(&self) -> usize {
        self.labels.iter().filter(|&&l| l == MINORITY).count()
    }

    /// N_majority / N_minority.
    pub fn imbalance_ratio(&self) -> f64 {
        self.n_majority() as f64 / self.n_minority() as f64
    }

    pub fn minority_indices(&self) -> Vec<usize> {
        self.indices_of(MINORITY)
    }

    pub fn majority_indices(&self) -> Vec<usize> {
        self.indices_of(MAJORITY)
    }

    fn indices_of(&self, label: u8) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| i)
            .collect()
    }

    /// Copy out the rows at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Dataset> {
        let dim = self.dim();
        let mut features = Array2::zeros((indices.len(), dim));
        let mut labels = Vec::with_capacity(indices.len());
        let mut synthetic = Vec::with_capacity(indices.len());
        for (out, &idx) in indices.iter().enumerate() {
            if idx >= self.n_rows() {
                return Err(Error::data(format!("row index {idx} out of range")));
            }
            features.row_mut(out).assign(&self.features.row(idx));
            labels.push(self.labels[idx]);
            synthetic.push(self.synthetic[idx]);
        }
        let mut ds = Dataset::from_parts_flagged(features, labels, synthetic)?;
        ds.label_names = self.label_names.clone();
        Ok(ds)
    }

    /// Append minority rows (used by resamplers), flagged as synthetic.
    pub fn append_minority_rows(&self, rows: ArrayView2<'_, f64>) -> Result<Dataset> {
        if rows.ncols() != self.dim() && rows.nrows() > 0 {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rows.ncols(),
            });
        }
        let n_new = rows.nrows();
        let mut features = Array2::zeros((self.n_rows() + n_new, self.dim()));
        features
            .slice_mut(ndarray::s![..self.n_rows(), ..])
            .assign(&self.features);
        if n_new > 0 {
            features
                .slice_mut(ndarray::s![self.n_rows().., ..])
                .assign(&rows);
        }
        let mut labels = self.labels.clone();
        labels.extend(std::iter::repeat(MINORITY).take(n_new));
        let mut synthetic = self.synthetic.clone();
        synthetic.extend(std::iter::repeat(true).take(n_new));
        let mut ds = Dataset::from_parts_flagged(features, labels, synthetic)?;
        ds.label_names = self.label_names.clone();
        Ok(ds)
    }
}

/// Disjoint train/validation/test parts of one source dataset.
#[derive(Debug, Clone)]
pub struct SplitDataset {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

impl SplitDataset {
    pub fn total_rows(&self) -> usize {
        self.train.n_rows() + self.validation.n_rows() + self.test.n_rows()
    }
}
