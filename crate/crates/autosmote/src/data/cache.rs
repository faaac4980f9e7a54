//! Versioned JSON sidecar for encoded datasets, so repeated runs can skip
//! ingestion and preprocessing of the same source file.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    dim: usize,
    /// Row-major feature values, `labels.len() * dim` entries.
    features: Vec<f64>,
    labels: Vec<u8>,
    synthetic: Vec<bool>,
    label_names: Option<[String; 2]>,
}

/// Write `ds` to `path` as a versioned JSON cache file.
pub fn save_cache(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let file = CacheFile {
        version: CACHE_VERSION,
        dim: ds.dim(),
        features: ds.features().iter().copied().collect(),
        labels: ds.labels().to_vec(),
        synthetic: ds.synthetic_flags().to_vec(),
        label_names: ds.label_names().cloned(),
    };
    let json = serde_json::to_vec_pretty(&file)?;
    fs::write(path, json)?;
    Ok(())
}

/// Load a dataset cache file from disk.
pub fn load_cache(path: impl AsRef<Path>) -> Result<Dataset> {
    let bytes = fs::read(path.as_ref())
        .map_err(|e| Error::data(format!("cannot read {}: {e}", path.as_ref().display())))?;
    load_cache_from_slice(&bytes)
}

/// Decode a dataset cache from JSON bytes, validating version and shape.
pub fn load_cache_from_slice(bytes: &[u8]) -> Result<Dataset> {
    let file: CacheFile = serde_json::from_slice(bytes)
        .map_err(|e| Error::data(format!("invalid dataset cache: {e}")))?;
    if file.version != CACHE_VERSION {
        return Err(Error::data(format!(
            "unsupported dataset cache version {} (expected {CACHE_VERSION})",
            file.version
        )));
    }
    let n = file.labels.len();
    if file.features.len() != n * file.dim {
        return Err(Error::data(format!(
            "dataset cache shape mismatch: {} feature values for {} rows of width {}",
            file.features.len(),
            n,
            file.dim
        )));
    }
    if file.features.iter().any(|v| !v.is_finite()) {
        return Err(Error::data("dataset cache contains non-finite features"));
    }
    let features = Array2::from_shape_vec((n, file.dim), file.features)
        .map_err(|e| Error::data(format!("dataset cache shape error: {e}")))?;
    let mut ds = Dataset::from_parts_flagged(features, file.labels, file.synthetic)?;
    if let Some(names) = file.label_names {
        ds = ds.with_label_names(names);
    }
    Ok(ds)
}
