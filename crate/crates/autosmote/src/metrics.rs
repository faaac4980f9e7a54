//! Classification metrics used as RL reward and for evaluation.
//!
//! Minority (label 1) is always the positive class.

use crate::error::{Error, Result};

/// Binary confusion counts with minority = positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Metric selector exposed through configs and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MacroF1,
    Mcc,
}

impl Metric {
    pub fn compute(&self, c: &ConfusionCounts) -> f64 {
        match self {
            Metric::MacroF1 => macro_f1(c),
            Metric::Mcc => mcc(c),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::MacroF1 => "macro_f1",
            Metric::Mcc => "mcc",
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Count the confusion table of two equal-length {0,1} label vectors.
pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionCounts> {
    if y_true.is_empty() {
        return Err(Error::data("confusion: empty input"));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    let mut c = ConfusionCounts {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t > 1 || p > 1 {
            return Err(Error::data("confusion: labels must be 0 or 1"));
        }
        match (t, p) {
            (1, 1) => c.tp += 1,
            (0, 1) => c.fp += 1,
            (0, 0) => c.tn += 1,
            (1, 0) => c.fn_ += 1,
            _ => unreachable!(),
        }
    }
    Ok(c)
}

/// Unweighted mean of per-class F1 scores.
///
/// A class whose precision+recall denominator is zero contributes F1 = 0.
pub fn macro_f1(c: &ConfusionCounts) -> f64 {
    let pos = f1_from(c.tp, c.fp, c.fn_);
    // Negative class: its "true positives" are the tn cells.
    let neg = f1_from(c.tn, c.fn_, c.fp);
    (pos + neg) / 2.0
}

fn f1_from(tp: u64, fp: u64, fn_: u64) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

/// Matthews correlation coefficient; 0 when any denominator factor is 0.
pub fn mcc(c: &ConfusionCounts) -> f64 {
    let (tp, fp, tn, fn_) = (c.tp as f64, c.fp as f64, c.tn as f64, c.fn_ as f64);
    let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    if denom == 0.0 {
        return 0.0;
    }
    (tp * tn - fp * fn_) / denom.sqrt()
}

/// Convenience: metric straight from label vectors.
pub fn score(metric: Metric, y_true: &[u8], y_pred: &[u8]) -> Result<f64> {
    Ok(metric.compute(&confusion(y_true, y_pred)?))
}
