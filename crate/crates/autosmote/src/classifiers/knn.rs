//! k-nearest-neighbors with exact Euclidean distances.

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::data::Dataset;

/// Stored training set plus the neighborhood size.
#[derive(Debug, Clone)]
pub struct KnnModel {
    k: usize,
    features: Array2<f64>,
    labels: Vec<u8>,
}

pub(super) fn fit(train: &Dataset, k: usize) -> KnnModel {
    KnnModel {
        k: k.min(train.n_rows()),
        features: train.features().to_owned(),
        labels: train.labels().to_vec(),
    }
}

fn squared_distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl KnnModel {
    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn predict(&self, queries: ArrayView2<'_, f64>) -> Vec<u8> {
        queries.rows().into_iter().map(|q| self.predict_one(q)).collect()
    }

    fn predict_one(&self, query: ArrayView1<'_, f64>) -> u8 {
        // Ties on distance resolve to the lower training index; ties in the
        // vote resolve to the majority class 0.
        let mut dists: Vec<(f64, usize)> = self
            .features
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, row)| (squared_distance(query, row), i))
            .collect();
        dists.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let votes_for_minority = dists[..self.k]
            .iter()
            .filter(|(_, i)| self.labels[*i] == 1)
            .count();
        u8::from(votes_for_minority * 2 > self.k)
    }
}
