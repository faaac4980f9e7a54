//! Two-cluster toy dataset: a 2-D majority blob flanked by two small
//! minority clusters, one on each side. Linear one-sided resampling tends
//! to leave one cluster starved, which is exactly the failure mode a
//! per-instance strategy can avoid — handy for demos and end-to-end tests.

use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeedTree;

fn default_majority() -> usize {
    450
}
fn default_ir() -> f64 {
    // Reproduces the canonical 450-majority / 35-minority layout.
    450.0 / 35.0
}
fn default_majority_std() -> f64 {
    1.4
}
fn default_minority_std() -> f64 {
    0.5
}
fn default_cluster_offset() -> f64 {
    5.0
}

/// Geometry and size of the generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyConfig {
    /// Rows in the central majority blob.
    #[serde(default = "default_majority")]
    pub majority: usize,
    /// Imbalance ratio; the minority count is `round(majority / ir)`,
    /// split between the two clusters.
    #[serde(default = "default_ir")]
    pub ir: f64,
    #[serde(default = "default_majority_std")]
    pub majority_std: f64,
    #[serde(default = "default_minority_std")]
    pub minority_std: f64,
    /// Distance from the origin to each minority cluster center, along x.
    #[serde(default = "default_cluster_offset")]
    pub cluster_offset: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ToyConfig {
    fn default() -> ToyConfig {
        ToyConfig {
            majority: default_majority(),
            ir: default_ir(),
            majority_std: default_majority_std(),
            minority_std: default_minority_std(),
            cluster_offset: default_cluster_offset(),
            seed: 0,
        }
    }
}

impl ToyConfig {
    pub fn minority_count(&self) -> usize {
        (self.majority as f64 / self.ir).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.majority == 0 {
            return Err(Error::config("toy.majority must be >= 1"));
        }
        if !(self.ir.is_finite() && self.ir >= 1.0) {
            return Err(Error::config(format!(
                "toy.ir must be a finite ratio >= 1, got {}",
                self.ir
            )));
        }
        for (name, v) in [
            ("majority_std", self.majority_std),
            ("minority_std", self.minority_std),
            ("cluster_offset", self.cluster_offset),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("toy.{name} must be > 0, got {v}")));
            }
        }
        if self.minority_count() == 0 {
            return Err(Error::config(format!(
                "toy.ir {} leaves no minority rows for {} majorities",
                self.ir, self.majority
            )));
        }
        Ok(())
    }
}

fn sample_cluster(
    out: &mut Vec<f64>,
    n: usize,
    center: (f64, f64),
    std: f64,
    rng: &mut ChaCha8Rng,
) {
    let x = Normal::new(center.0, std).expect("std validated as finite and positive");
    let y = Normal::new(center.1, std).expect("std validated as finite and positive");
    for _ in 0..n {
        out.push(x.sample(rng));
        out.push(y.sample(rng));
    }
}

/// Generate the dataset. Majority rows come first, then the left cluster,
/// then the right; the left cluster takes the odd row when the minority
/// count is odd. Identical configs produce identical coordinates.
pub fn make_toy(config: &ToyConfig) -> Result<Dataset> {
    config.validate()?;
    let n_minority = config.minority_count();
    let n = config.majority + n_minority;
    let left = n_minority - n_minority / 2;
    let right = n_minority / 2;

    let seeds = SeedTree::new(config.seed);
    let mut rows = Vec::with_capacity(n * 2);
    sample_cluster(
        &mut rows,
        config.majority,
        (0.0, 0.0),
        config.majority_std,
        &mut seeds.stream("toy-majority"),
    );
    sample_cluster(
        &mut rows,
        left,
        (-config.cluster_offset, 0.0),
        config.minority_std,
        &mut seeds.stream("toy-minority-left"),
    );
    sample_cluster(
        &mut rows,
        right,
        (config.cluster_offset, 0.0),
        config.minority_std,
        &mut seeds.stream("toy-minority-right"),
    );

    let features = Array2::from_shape_vec((n, 2), rows).expect("row count matches buffer");
    let labels = (0..n).map(|i| u8::from(i >= config.majority)).collect();
    Ok(Dataset::from_parts(features, labels)?
        .with_label_names(["majority".to_string(), "minority".to_string()]))
}

/// Write a 2-D dataset as `x,y,label` CSV that [`crate::data::load_csv`]
/// reads back (labels as names, minority rarer so the mapping survives).
pub fn write_toy_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    if ds.dim() != 2 {
        return Err(Error::data(format!(
            "toy CSV export expects 2 feature columns, got {}",
            ds.dim()
        )));
    }
    let names = ds
        .label_names()
        .cloned()
        .unwrap_or_else(|| ["majority".to_string(), "minority".to_string()]);
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "x,y,label")?;
    for i in 0..ds.n_rows() {
        let row = ds.row(i);
        writeln!(out, "{},{},{}", row[0], row[1], names[ds.labels()[i] as usize])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::load_csv_from_reader;

    #[test]
    fn test_default_counts() {
        let ds = make_toy(&ToyConfig::default()).unwrap();
        assert_eq!(ds.n_majority(), 450);
        assert_eq!(ds.n_minority(), 35);
        assert_eq!(ds.dim(), 2);
    }

    #[test]
    fn test_ir_changes_minority_count_only() {
        let mut config = ToyConfig::default();
        config.ir = 30.0;
        let ds = make_toy(&config).unwrap();
        assert_eq!(ds.n_majority(), 450);
        assert_eq!(ds.n_minority(), 15);
        config.ir = 10.0;
        let ds = make_toy(&config).unwrap();
        assert_eq!(ds.n_majority(), 450);
        assert_eq!(ds.n_minority(), 45);
    }

    #[test]
    fn test_same_seed_identical_coordinates() {
        let config = ToyConfig {
            seed: 42,
            ..ToyConfig::default()
        };
        let a = make_toy(&config).unwrap();
        let b = make_toy(&config).unwrap();
        assert_eq!(a.features(), b.features());
        let c = make_toy(&ToyConfig {
            seed: 43,
            ..config
        })
        .unwrap();
        assert_ne!(a.features(), c.features());
    }

    #[test]
    fn test_minority_clusters_flank_the_majority() {
        let ds = make_toy(&ToyConfig::default()).unwrap();
        let (mut left, mut right) = (0usize, 0usize);
        for &i in &ds.minority_indices() {
            let x = ds.row(i)[0];
            // 0.5 std around ±5 keeps every sample far from the center.
            assert!(x.abs() > 2.5, "minority row at x = {x}");
            if x < 0.0 {
                left += 1;
            } else {
                right += 1;
            }
        }
        assert_eq!(left, 18);
        assert_eq!(right, 17);
        // The majority blob stays around the origin.
        let mean_abs_x: f64 = ds
            .majority_indices()
            .iter()
            .map(|&i| ds.row(i)[0].abs())
            .sum::<f64>()
            / ds.n_majority() as f64;
        assert!(mean_abs_x < 2.0);
    }

    #[test]
    fn test_csv_round_trip_preserves_everything() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.csv");
        let ds = make_toy(&ToyConfig {
            seed: 3,
            ..ToyConfig::default()
        })
        .unwrap();
        write_toy_csv(&ds, &path).unwrap();
        let raw = load_csv_from_reader(
            std::fs::File::open(&path).unwrap(),
            "label",
            None,
        )
        .unwrap();
        assert_eq!(raw.n_majority(), 450);
        assert_eq!(raw.n_minority(), 35);
        assert_eq!(raw.minority_indices(), ds.minority_indices());
    }

    #[test]
    fn test_validate_rejects_bad_geometry() {
        let mut bad = ToyConfig::default();
        bad.minority_std = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = ToyConfig::default();
        bad.ir = 0.5;
        assert!(bad.validate().is_err());
        let mut bad = ToyConfig::default();
        bad.majority = 0;
        assert!(bad.validate().is_err());
    }
}
