//! Observation vectors for the three decision levels.
//!
//! All three policies see fixed-width vectors built from the standardized
//! training features plus a coarse usage signal: how often each minority
//! instance has already participated in an interpolation this episode.
//! Usage is bucketed into [`USAGE_BINS`] one-hot bins so the vector width
//! does not depend on how many samples an episode generates.

use ndarray::ArrayView1;

use crate::data::Dataset;

/// Number of one-hot buckets for per-instance usage counts.
pub const USAGE_BINS: usize = 10;

/// Interpolation coefficients the low-level policy chooses among.
pub const LAMBDA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Width of a low-level action descriptor: neighbor usage one-hot plus
/// coefficient one-hot.
pub const LOW_ACTION_FEATURE_DIM: usize = USAGE_BINS + LAMBDA_GRID.len();

/// Bucket a raw usage count: one bin per ten uses, saturating at the top.
pub fn usage_bin(count: usize) -> usize {
    (count / USAGE_BINS).min(USAGE_BINS - 1)
}

/// Per-episode participation counts for the minority instances.
///
/// Every interpolation touches two instances — the source and the chosen
/// neighbor — and both counts advance. Counts reset at episode start.
#[derive(Debug, Clone)]
pub struct UsageCounter {
    counts: Vec<usize>,
}

impl UsageCounter {
    pub fn new(n_instances: usize) -> UsageCounter {
        UsageCounter {
            counts: vec![0; n_instances],
        }
    }

    pub fn record(&mut self, source: usize, neighbor: usize) {
        self.counts[source] += 1;
        self.counts[neighbor] += 1;
    }

    pub fn count(&self, instance: usize) -> usize {
        self.counts[instance]
    }

    pub fn bin(&self, instance: usize) -> usize {
        usage_bin(self.counts[instance])
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

fn push_one_hot(out: &mut Vec<f64>, width: usize, hot: usize) {
    debug_assert!(hot < width);
    let start = out.len();
    out.resize(start + width, 0.0);
    out[start + hot] = 1.0;
}

/// Observation for one minority instance: its feature vector followed by
/// the one-hot bucket of its current usage count.
pub fn instance_state(features: ArrayView1<'_, f64>, usage_count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(features.len() + USAGE_BINS);
    out.extend(features.iter().copied());
    push_one_hot(&mut out, USAGE_BINS, usage_bin(usage_count));
    out
}

/// Episode-level observation: the mean minority feature vector, padded
/// with a one-hot marking the zero-usage bucket so the cross policy sees
/// the same width as the instance policy.
pub fn cross_state(train: &Dataset) -> Vec<f64> {
    let minority = train.minority_indices();
    let dim = train.dim();
    let mut mean = vec![0.0; dim];
    for &row in &minority {
        for (acc, v) in mean.iter_mut().zip(train.row(row).iter()) {
            *acc += v;
        }
    }
    if !minority.is_empty() {
        let n = minority.len() as f64;
        for v in &mut mean {
            *v /= n;
        }
    }
    push_one_hot(&mut mean, USAGE_BINS, 0);
    mean
}

/// Descriptor of one candidate low-level action: the candidate neighbor's
/// usage bucket one-hot followed by the coefficient-slot one-hot.
pub fn low_action_features(neighbor_usage_count: usize, lambda_slot: usize) -> Vec<f64> {
    low_action_features_from_bin(usage_bin(neighbor_usage_count), lambda_slot)
}

/// Same descriptor built from an already-bucketed usage count; recorded
/// trajectories store buckets, not raw counts.
pub fn low_action_features_from_bin(usage_bin: usize, lambda_slot: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(LOW_ACTION_FEATURE_DIM);
    push_one_hot(&mut out, USAGE_BINS, usage_bin);
    push_one_hot(&mut out, LAMBDA_GRID.len(), lambda_slot);
    out
}
