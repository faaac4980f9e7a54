//! Linear SVM: hinge loss with L2 regularization, trained by stochastic
//! subgradient descent with step size 1/(lambda * t).
//!
//! The bias is folded in as an augmented constant feature, so a single
//! weight vector is regularized and updated uniformly. Visiting order is one
//! fixed permutation drawn from the seed and reused every epoch, which keeps
//! training bit-deterministic.

use ndarray::{ArrayView1, ArrayView2};
use rand::seq::SliceRandom;

use crate::data::Dataset;
use crate::rng::SeedTree;

#[derive(Debug, Clone)]
pub struct SvmModel {
    weights: Vec<f64>,
    bias: f64,
}

pub(super) fn fit(train: &Dataset, epochs: usize, lambda: f64, seed: u64) -> SvmModel {
    let n = train.n_rows();
    let dim = train.dim();
    let features = train.features();
    // Classes as +1 (minority) / -1 (majority).
    let targets: Vec<f64> = train
        .labels()
        .iter()
        .map(|&l| if l == 1 { 1.0 } else { -1.0 })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut SeedTree::new(seed).stream("linear-svm-order"));

    // w has dim + 1 entries; the last one is the bias weight for the
    // augmented constant-1 feature.
    let mut w = vec![0.0f64; dim + 1];
    let mut t = 0u64;
    for _ in 0..epochs {
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let x = features.row(i);
            let margin = targets[i] * (dot(&w, x) + w[dim]);
            // L2 shrinkage applies every step; the hinge push only when the
            // margin constraint is violated.
            let shrink = 1.0 - eta * lambda;
            for wj in w.iter_mut() {
                *wj *= shrink;
            }
            if margin < 1.0 {
                let step = eta * targets[i];
                for (wj, &xj) in w.iter_mut().zip(x.iter()) {
                    *wj += step * xj;
                }
                w[dim] += step;
            }
        }
    }

    let bias = w[dim];
    w.truncate(dim);
    SvmModel { weights: w, bias }
}

fn dot(w: &[f64], x: ArrayView1<'_, f64>) -> f64 {
    w.iter().take(x.len()).zip(x.iter()).map(|(a, b)| a * b).sum()
}

impl SvmModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn decision_value(&self, x: ArrayView1<'_, f64>) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    pub fn predict(&self, queries: ArrayView2<'_, f64>) -> Vec<u8> {
        queries
            .rows()
            .into_iter()
            // A zero decision value falls to the majority class.
            .map(|q| u8::from(self.decision_value(q) > 0.0))
            .collect()
    }
}
