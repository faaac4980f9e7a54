//! Boosted depth-1 decision stumps with stage weights, two-class variant.

use ndarray::{ArrayView1, ArrayView2};

use crate::data::Dataset;

/// Threshold rule: rows with `x[feature] <= threshold` get `left_label`,
/// the rest get `right_label`.
#[derive(Debug, Clone)]
struct Stump {
    feature: usize,
    threshold: f64,
    left_label: u8,
    right_label: u8,
}

impl Stump {
    fn predict(&self, x: ArrayView1<'_, f64>) -> u8 {
        if x[self.feature] <= self.threshold {
            self.left_label
        } else {
            self.right_label
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdaBoostModel {
    /// `(stage_weight, stump)` pairs in boosting order.
    stages: Vec<(f64, Stump)>,
    /// Training-majority fallback when no stump was accepted.
    fallback: u8,
    dim: usize,
}

struct WeightedStump {
    stump: Stump,
    error: f64,
}

/// Exhaustive weighted-error minimization over features and midpoint
/// thresholds. Each side predicts its heavier class (ties to class 0);
/// candidate ties keep the lower feature index, then the lower threshold.
fn best_stump(
    features: ArrayView2<'_, f64>,
    labels: &[u8],
    weights: &[f64],
) -> WeightedStump {
    let n = labels.len();
    let total: [f64; 2] = labels.iter().zip(weights).fold([0.0; 2], |mut acc, (&l, &w)| {
        acc[l as usize] += w;
        acc
    });

    // Constant fallback for featureless corners: everything on the right
    // side predicting the heavier class.
    let constant_label = u8::from(total[1] > total[0]);
    let mut best = WeightedStump {
        stump: Stump {
            feature: 0,
            threshold: f64::NEG_INFINITY,
            left_label: constant_label,
            right_label: constant_label,
        },
        error: total[(1 - constant_label) as usize],
    };

    let mut column: Vec<(f64, u8, f64)> = Vec::with_capacity(n);
    for feature in 0..features.ncols() {
        column.clear();
        column.extend(
            (0..n).map(|r| (features[[r, feature]], labels[r], weights[r])),
        );
        column.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let mut left = [0.0f64; 2];
        for i in 1..n {
            left[column[i - 1].1 as usize] += column[i - 1].2;
            if column[i].0 <= column[i - 1].0 {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1]];
            let left_label = u8::from(left[1] > left[0]);
            let right_label = u8::from(right[1] > right[0]);
            let error =
                left[(1 - left_label) as usize] + right[(1 - right_label) as usize];
            if error < best.error {
                best = WeightedStump {
                    stump: Stump {
                        feature,
                        threshold: (column[i - 1].0 + column[i].0) / 2.0,
                        left_label,
                        right_label,
                    },
                    error,
                };
            }
        }
    }
    best
}

pub(super) fn fit(train: &Dataset, rounds: usize) -> AdaBoostModel {
    let n = train.n_rows();
    let features = train.features();
    let labels = train.labels();
    let fallback = {
        let minority = train.n_minority();
        u8::from(minority * 2 > n)
    };
    let mut weights = vec![1.0 / n as f64; n];
    let mut stages = Vec::new();

    for _ in 0..rounds {
        let WeightedStump { stump, error } = best_stump(features, labels, &weights);
        // A stump no better than coin-flipping adds nothing; stop boosting.
        if error >= 0.5 {
            break;
        }
        // Clamp so a perfect stump gets a large but finite stage weight.
        let clamped = error.max(1e-12);
        let alpha = ((1.0 - clamped) / clamped).ln();
        let misclassified: Vec<bool> = (0..n)
            .map(|r| stump.predict(features.row(r)) != labels[r])
            .collect();
        stages.push((alpha, stump));
        if error == 0.0 {
            break;
        }
        for (w, miss) in weights.iter_mut().zip(&misclassified) {
            if *miss {
                *w *= alpha.exp();
            }
        }
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
    }

    AdaBoostModel {
        stages,
        fallback,
        dim: train.dim(),
    }
}

impl AdaBoostModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_stages(&self) -> usize {
        self.stages.len()
    }

    pub fn predict(&self, queries: ArrayView2<'_, f64>) -> Vec<u8> {
        queries.rows().into_iter().map(|q| self.predict_one(q)).collect()
    }

    fn predict_one(&self, query: ArrayView1<'_, f64>) -> u8 {
        if self.stages.is_empty() {
            return self.fallback;
        }
        let mut score = [0.0f64; 2];
        for (alpha, stump) in &self.stages {
            score[stump.predict(query) as usize] += *alpha;
        }
        // Ties favor the majority class 0.
        u8::from(score[1] > score[0])
    }
}
