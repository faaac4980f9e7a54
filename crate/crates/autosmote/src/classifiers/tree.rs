//! Binary decision tree grown greedily on Gini impurity.

use ndarray::{ArrayView1, ArrayView2};

use crate::data::Dataset;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        label: u8,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// A fitted tree; nodes live in a flat arena with the root at index 0.
#[derive(Debug, Clone)]
pub struct TreeModel {
    nodes: Vec<Node>,
    dim: usize,
}

fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    /// Weighted child impurity; lower is better.
    impurity: f64,
}

/// Find the impurity-minimizing split over all features and midpoint
/// thresholds, or `None` when no split strictly improves on the parent.
/// Ties keep the first candidate in scan order: lower feature index, then
/// lower threshold.
fn best_split(features: ArrayView2<'_, f64>, labels: &[u8], rows: &[usize]) -> Option<SplitChoice> {
    let n = rows.len();
    let mut counts = [0usize; 2];
    for &r in rows {
        counts[labels[r] as usize] += 1;
    }
    let parent = gini(counts);
    if parent == 0.0 {
        return None;
    }

    let mut best: Option<SplitChoice> = None;
    let mut column: Vec<(f64, u8)> = Vec::with_capacity(n);
    for feature in 0..features.ncols() {
        column.clear();
        column.extend(rows.iter().map(|&r| (features[[r, feature]], labels[r])));
        column.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let mut left = [0usize; 2];
        for i in 1..n {
            left[column[i - 1].1 as usize] += 1;
            if column[i].0 <= column[i - 1].0 {
                continue; // no boundary between equal values
            }
            let right = [counts[0] - left[0], counts[1] - left[1]];
            let n_left = (left[0] + left[1]) as f64;
            let n_right = (right[0] + right[1]) as f64;
            let impurity = (n_left * gini(left) + n_right * gini(right)) / n as f64;
            let improves = match &best {
                None => impurity < parent,
                Some(b) => impurity < b.impurity,
            };
            if improves {
                best = Some(SplitChoice {
                    feature,
                    threshold: (column[i - 1].0 + column[i].0) / 2.0,
                    impurity,
                });
            }
        }
    }
    best
}

fn majority_label(labels: &[u8], rows: &[usize]) -> u8 {
    let minority_count = rows.iter().filter(|&&r| labels[r] == 1).count();
    // Ties favor the majority class 0.
    u8::from(minority_count * 2 > rows.len())
}

fn build(
    features: ArrayView2<'_, f64>,
    labels: &[u8],
    rows: &[usize],
    depth: usize,
    max_depth: usize,
    min_samples_split: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let leaf = |nodes: &mut Vec<Node>| {
        nodes.push(Node::Leaf {
            label: majority_label(labels, rows),
        });
        nodes.len() - 1
    };
    if depth >= max_depth || rows.len() < min_samples_split {
        return leaf(nodes);
    }
    let Some(choice) = best_split(features, labels, rows) else {
        return leaf(nodes);
    };
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
        .iter()
        .partition(|&&r| features[[r, choice.feature]] <= choice.threshold);

    let index = nodes.len();
    nodes.push(Node::Leaf { label: 0 }); // placeholder, patched below
    let left = build(
        features,
        labels,
        &left_rows,
        depth + 1,
        max_depth,
        min_samples_split,
        nodes,
    );
    let right = build(
        features,
        labels,
        &right_rows,
        depth + 1,
        max_depth,
        min_samples_split,
        nodes,
    );
    nodes[index] = Node::Split {
        feature: choice.feature,
        threshold: choice.threshold,
        left,
        right,
    };
    index
}

pub(super) fn fit(train: &Dataset, max_depth: usize, min_samples_split: usize) -> TreeModel {
    let rows: Vec<usize> = (0..train.n_rows()).collect();
    let mut nodes = Vec::new();
    build(
        train.features(),
        train.labels(),
        &rows,
        0,
        max_depth,
        min_samples_split,
        &mut nodes,
    );
    TreeModel {
        nodes,
        dim: train.dim(),
    }
}

impl TreeModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn predict(&self, queries: ArrayView2<'_, f64>) -> Vec<u8> {
        queries.rows().into_iter().map(|q| self.predict_one(q)).collect()
    }

    fn predict_one(&self, query: ArrayView1<'_, f64>) -> u8 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { label } => return *label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if query[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }
}
