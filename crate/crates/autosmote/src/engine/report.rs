//! Run reports and cross-report comparison.
//!
//! A report is one method evaluated on one (dataset, classifier, imbalance,
//! metric) cell across several seeds. `compare` aggregates many reports
//! into average ranks per method, the standard way to summarize resamplers
//! across heterogeneous cells where raw scores aren't commensurable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifiers::ClassifierSpec;
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::search::IterationRecord;

pub const REPORT_VERSION: u32 = 1;

/// Shape of the working dataset after any artificial imbalance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub rows: usize,
    pub features: usize,
    pub majority: usize,
    pub minority: usize,
    pub imbalance_ratio: f64,
}

/// What the method selected on validation data.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChosenStrategy {
    /// Winning target ratio (grid-tuned baselines).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    /// Grid points actually fitted (grid-tuned baselines).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_fits: Option<usize>,
    /// Iteration that produced the kept strategy (search methods).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_iteration: Option<usize>,
    /// Synthetic or duplicated rows added to the training set.
    pub added_rows: usize,
}

/// One seed's end-to-end outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    /// Score of the selected strategy on the validation part.
    pub validation_score: f64,
    /// Score of the final model on the held-out test part.
    pub test_score: f64,
    /// Audit counter: times the test part was evaluated. Always 1 in a
    /// clean run.
    pub test_evaluations: usize,
    pub wall_clock_seconds: f64,
    pub chosen: ChosenStrategy,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub incidents: Vec<String>,
    /// Per-iteration search trace (search methods only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub history: Option<Vec<IterationRecord>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub mean_validation: f64,
    pub mean_test: f64,
    pub median_test: f64,
}

/// Where the numbers came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentFingerprint {
    pub package: String,
    pub package_version: String,
    pub os: String,
    pub arch: String,
}

impl EnvironmentFingerprint {
    pub fn current() -> EnvironmentFingerprint {
        EnvironmentFingerprint {
            package: env!("CARGO_PKG_NAME").to_string(),
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
        }
    }
}

/// Full record of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: u32,
    pub method: String,
    pub dataset: String,
    pub label_column: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_ir: Option<f64>,
    pub classifier: ClassifierSpec,
    pub metric: Metric,
    pub dataset_summary: DatasetSummary,
    pub seeds: Vec<SeedOutcome>,
    pub summary: ScoreSummary,
    pub environment: EnvironmentFingerprint,
}

/// Identity of a comparison cell: reports with equal cells measure the
/// same task, so their methods can be ranked against each other.
#[derive(Debug, Clone, PartialEq)]
pub struct CellKey {
    pub dataset: String,
    pub classifier: ClassifierSpec,
    pub target_ir: Option<f64>,
    pub metric: Metric,
}

impl RunReport {
    pub fn cell(&self) -> CellKey {
        CellKey {
            dataset: self.dataset.clone(),
            classifier: self.classifier.clone(),
            target_ir: self.target_ir,
            metric: self.metric,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Decode and version-check a report from raw JSON bytes.
    pub fn from_slice(data: &[u8]) -> Result<RunReport> {
        let report: RunReport = serde_json::from_slice(data)
            .map_err(|e| Error::data(format!("invalid report: {e}")))?;
        if report.version != REPORT_VERSION {
            return Err(Error::data(format!(
                "report has version {}, this build reads version {}",
                report.version, REPORT_VERSION
            )));
        }
        Ok(report)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RunReport> {
        let path = path.as_ref();
        let bytes = std::fs::read(path)
            .map_err(|e| Error::data(format!("cannot read report {}: {e}", path.display())))?;
        RunReport::from_slice(&bytes).map_err(|e| match e {
            Error::Data(msg) => Error::data(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// One method's aggregate across every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRank {
    pub method: String,
    /// Mean of the method's per-cell ranks; lower is better, ties within a
    /// cell share the mean of the positions they span.
    pub average_rank: f64,
    pub cells: usize,
    /// Mean of the method's mean test scores across cells.
    pub mean_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    /// Sorted by ascending average rank; equal ranks sort by name.
    pub methods: Vec<MethodRank>,
    pub cells: usize,
}

impl RankTable {
    /// Plain-text rendering for the terminal.
    pub fn to_text(&self) -> String {
        let name_width = self
            .methods
            .iter()
            .map(|m| m.method.len())
            .chain(["method".len()])
            .max()
            .unwrap_or(6);
        let mut out = format!(
            "{:<name_width$}  {:>9}  {:>11}  {:>5}\n",
            "method", "avg rank", "mean score", "cells"
        );
        for m in &self.methods {
            out.push_str(&format!(
                "{:<name_width$}  {:>9.2}  {:>11.4}  {:>5}\n",
                m.method, m.average_rank, m.mean_score, m.cells
            ));
        }
        out
    }
}

/// Fractional ranks of `scores`, higher score = better = lower rank.
fn fractional_ranks(scores: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // Positions i+1..=j share the mean rank of the span.
        let shared = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = shared;
        }
        i = j;
    }
    ranks
}

/// Rank methods across reports. Reports are grouped into cells by
/// (dataset, classifier, target imbalance, metric); every cell must hold
/// the same set of methods exactly once, and each method's per-cell ranks
/// (by mean test score) are averaged.
pub fn compare(reports: &[RunReport]) -> Result<RankTable> {
    if reports.len() < 2 {
        return Err(Error::config(format!(
            "compare needs at least 2 reports, got {}",
            reports.len()
        )));
    }
    let mut cells: Vec<(CellKey, Vec<(String, f64)>)> = Vec::new();
    for report in reports {
        let key = report.cell();
        let idx = match cells.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                cells.push((key, Vec::new()));
                cells.len() - 1
            }
        };
        let entry = &mut cells[idx].1;
        if entry.iter().any(|(m, _)| *m == report.method) {
            return Err(Error::data(format!(
                "method {:?} appears twice in the cell (dataset {:?}, \
                 classifier {}, metric {})",
                report.method,
                report.dataset,
                report.classifier.kind_name(),
                report.metric.name()
            )));
        }
        entry.push((report.method.clone(), report.summary.mean_test));
    }

    let mut methods: Vec<String> = cells[0].1.iter().map(|(m, _)| m.clone()).collect();
    methods.sort();
    for (key, entry) in &cells {
        let mut here: Vec<String> = entry.iter().map(|(m, _)| m.clone()).collect();
        here.sort();
        if here != methods {
            return Err(Error::data(format!(
                "mismatched cells: (dataset {:?}, classifier {}, metric {}) \
                 covers methods {:?}, other cells cover {:?}",
                key.dataset,
                key.classifier.kind_name(),
                key.metric.name(),
                here,
                methods
            )));
        }
    }

    let mut rank_sum = vec![0.0; methods.len()];
    let mut score_sum = vec![0.0; methods.len()];
    for (_, entry) in &cells {
        let scores: Vec<f64> = methods
            .iter()
            .map(|m| {
                entry
                    .iter()
                    .find(|(name, _)| name == m)
                    .expect("method sets were checked equal")
                    .1
            })
            .collect();
        for (i, rank) in fractional_ranks(&scores).into_iter().enumerate() {
            rank_sum[i] += rank;
            score_sum[i] += scores[i];
        }
    }

    let n_cells = cells.len() as f64;
    let mut ranked: Vec<MethodRank> = methods
        .into_iter()
        .enumerate()
        .map(|(i, method)| MethodRank {
            method,
            average_rank: rank_sum[i] / n_cells,
            cells: cells.len(),
            mean_score: score_sum[i] / n_cells,
        })
        .collect();
    ranked.sort_by(|a, b| {
        a.average_rank
            .total_cmp(&b.average_rank)
            .then_with(|| a.method.cmp(&b.method))
    });
    Ok(RankTable {
        methods: ranked,
        cells: cells.len(),
    })
}
