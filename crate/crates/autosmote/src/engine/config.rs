//! Experiment configuration: one file describes the dataset, the method
//! under test, the downstream classifier, and every knob of the run.
//!
//! Files are TOML by default; a `.json` extension switches to JSON. Unknown
//! keys are rejected everywhere so typos fail loudly before any work runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::ClassifierSpec;
use crate::data::SchemaHints;
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::search::SearchConfig;

fn default_label_column() -> String {
    "label".to_string()
}
fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2, 3, 4]
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}
fn default_ratio_grid() -> Vec<f64> {
    // Desired minority/majority ratios 0.1, 0.2, ..., 1.0.
    (1..=10).map(|i| i as f64 / 10.0).collect()
}
fn default_smote_k() -> usize {
    5
}
fn default_split() -> SplitFractions {
    SplitFractions {
        train: 0.6,
        validation: 0.2,
        test: 0.2,
    }
}

/// Which resampling method the run evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Learned hierarchical strategy search.
    Autosmote,
    /// Same search space and budget, uniformly random decisions.
    RandomSearch,
    /// Interpolation over-sampling with a validation-tuned target ratio.
    Smote,
    /// Minority duplication with a validation-tuned target ratio.
    RandomOver,
    /// Majority removal with a validation-tuned target ratio.
    RandomUnder,
    /// No resampling at all.
    #[serde(rename = "none")]
    NoResampling,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Autosmote => "autosmote",
            Method::RandomSearch => "random_search",
            Method::Smote => "smote",
            Method::RandomOver => "random_over",
            Method::RandomUnder => "random_under",
            Method::NoResampling => "none",
        }
    }

    /// Whether this method runs the episode search loop.
    pub fn is_search(&self) -> bool {
        matches!(self, Method::Autosmote | Method::RandomSearch)
    }
}

/// Train/validation/test fractions; must be positive and sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitFractions {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl SplitFractions {
    pub fn as_tuple(&self) -> (f64, f64, f64) {
        (self.train, self.validation, self.test)
    }
}

/// Optional per-field overrides of the data-derived search defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchOverrides {
    pub g1_max: Option<usize>,
    pub g2_max: Option<usize>,
    pub k: Option<usize>,
    pub iterations: Option<usize>,
    pub buffer_cross: Option<usize>,
    pub buffer_instance: Option<usize>,
    pub buffer_low: Option<usize>,
    pub gamma: Option<f64>,
    pub rho_bar: Option<f64>,
    pub c_bar: Option<f64>,
    pub entropy_coef: Option<f64>,
    pub learning_rate: Option<f64>,
    pub grad_clip: Option<f64>,
    pub scorer_hidden: Option<usize>,
}

impl SearchOverrides {
    pub fn apply(&self, base: &mut SearchConfig) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field {
                    base.$field = v;
                })*
            };
        }
        take!(
            g1_max,
            g2_max,
            k,
            iterations,
            buffer_cross,
            buffer_instance,
            buffer_low,
            gamma,
            rho_bar,
            c_bar,
            entropy_coef,
            learning_rate,
            grad_clip,
            scorer_hidden
        );
    }
}

/// Everything one experiment needs, minus the data itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// CSV file with a header row and a binary label column.
    pub dataset: PathBuf,
    #[serde(default = "default_label_column")]
    pub label_column: String,
    /// Column-type hints for ambiguous CSV columns.
    #[serde(default)]
    pub schema: SchemaHints,
    /// Subsample the minority before splitting to reach this ratio.
    #[serde(default)]
    pub target_ir: Option<f64>,
    pub method: Method,
    pub classifier: ClassifierSpec,
    pub metric: Metric,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Parallel episode actors; omitted means min(40, available cores).
    #[serde(default)]
    pub actors: Option<usize>,
    /// Where reports and artifacts land. The `AUTOSMOTE_OUTPUT_DIR`
    /// environment variable overrides this at run time.
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub search: Option<SearchOverrides>,
    /// Target-ratio grid for the baseline samplers.
    #[serde(default = "default_ratio_grid")]
    pub ratio_grid: Vec<f64>,
    /// Neighbor count of the SMOTE baseline.
    #[serde(default = "default_smote_k")]
    pub smote_k: usize,
    #[serde(default = "default_split")]
    pub split: SplitFractions,
}

impl ExperimentConfig {
    /// Decode from TOML text; structural errors only, call
    /// [`validate`](Self::validate) afterwards.
    pub fn from_toml_str(text: &str) -> Result<ExperimentConfig> {
        toml::from_str(text).map_err(|e| Error::config(format!("invalid TOML config: {e}")))
    }

    /// Decode from JSON text; structural errors only, call
    /// [`validate`](Self::validate) afterwards.
    pub fn from_json_str(text: &str) -> Result<ExperimentConfig> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("invalid JSON config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::config("seeds must list at least one seed"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(Error::config("seeds must be distinct"));
        }
        if let Some(ir) = self.target_ir {
            if !(ir.is_finite() && ir >= 1.0) {
                return Err(Error::config(format!(
                    "target_ir must be a finite ratio >= 1, got {ir}"
                )));
            }
        }
        if self.actors == Some(0) {
            return Err(Error::config("actors must be >= 1 when given"));
        }
        if self.ratio_grid.is_empty() {
            return Err(Error::config("ratio_grid must not be empty"));
        }
        for &r in &self.ratio_grid {
            if !(r.is_finite() && r > 0.0 && r <= 1.0) {
                return Err(Error::config(format!(
                    "ratio_grid values must be in (0, 1], got {r}"
                )));
            }
        }
        if self.smote_k == 0 {
            return Err(Error::config("smote_k must be >= 1"));
        }
        let (a, b, c) = self.split.as_tuple();
        for f in [a, b, c] {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::config(format!(
                    "split fractions must be positive, got {:?}",
                    self.split
                )));
            }
        }
        if (a + b + c - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "split fractions must sum to 1, got {:?}",
                self.split
            )));
        }
        self.classifier.validate()?;
        Ok(())
    }

    /// Actor count to run with: the configured value, or min(40, cores).
    pub fn effective_actors(&self) -> usize {
        self.actors.unwrap_or_else(|| {
            let cores = std::thread::available_parallelism()
                .map(std::num::NonZeroUsize::get)
                .unwrap_or(1);
            cores.min(40)
        })
    }

    /// Output directory after applying the environment override.
    pub fn resolved_output_dir(&self) -> PathBuf {
        std::env::var_os("AUTOSMOTE_OUTPUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| self.output_dir.clone())
    }

    pub fn schema_hints(&self) -> Option<SchemaHints> {
        if self.schema.is_empty() {
            None
        } else {
            Some(self.schema.clone())
        }
    }
}

/// Parse a config file; `.json` files as JSON, everything else as TOML.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        ExperimentConfig::from_json_str(&text)
    } else {
        ExperimentConfig::from_toml_str(&text)
    };
    let config = parsed.map_err(|e| match e {
        Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    config.validate()?;
    Ok(config)
}
