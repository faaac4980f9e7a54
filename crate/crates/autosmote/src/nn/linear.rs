//! Fully connected layer with uniform fan-in-scaled initialization.

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// `y = W x + b`, with `W` of shape `(out, in)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

/// Gradient buffers matching a [`Linear`]'s shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGrads {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Linear {
    /// Initialize weights and biases from `U(-1/sqrt(in), 1/sqrt(in))`.
    pub fn init(in_dim: usize, out_dim: usize, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        Linear {
            w: Array2::from_shape_fn((out_dim, in_dim), |_| rng.gen_range(-bound..bound)),
            b: Array1::from_shape_fn(out_dim, |_| rng.gen_range(-bound..bound)),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn forward(&self, x: ArrayView1<'_, f64>) -> Array1<f64> {
        self.w.dot(&x) + &self.b
    }

    /// Gradients of a scalar loss given `d_out = dL/dy` and the input `x`:
    /// `dL/dW = d_out xᵀ`, `dL/db = d_out`, and the returned
    /// `dL/dx = Wᵀ d_out`.
    pub fn backward(
        &self,
        x: ArrayView1<'_, f64>,
        d_out: ArrayView1<'_, f64>,
        grads: &mut LinearGrads,
    ) -> Array1<f64> {
        for (mut row, &g) in grads.w.rows_mut().into_iter().zip(d_out.iter()) {
            row.scaled_add(g, &x);
        }
        grads.b.scaled_add(1.0, &d_out);
        self.w.t().dot(&d_out)
    }

    pub fn param_count(&self) -> usize {
        self.w.len() + self.b.len()
    }

    pub fn write_flat(&self, out: &mut Vec<f64>) {
        out.extend(self.w.iter());
        out.extend(self.b.iter());
    }

    pub fn read_flat(&mut self, data: &[f64], pos: &mut usize) {
        for v in self.w.iter_mut() {
            *v = data[*pos];
            *pos += 1;
        }
        for v in self.b.iter_mut() {
            *v = data[*pos];
            *pos += 1;
        }
    }
}

impl LinearGrads {
    pub fn zeros_like(layer: &Linear) -> Self {
        LinearGrads {
            w: Array2::zeros(layer.w.raw_dim()),
            b: Array1::zeros(layer.b.raw_dim()),
        }
    }

    pub fn write_flat(&self, out: &mut Vec<f64>) {
        out.extend(self.w.iter());
        out.extend(self.b.iter());
    }

    pub fn add_assign(&mut self, other: &LinearGrads) {
        self.w.scaled_add(1.0, &other.w);
        self.b.scaled_add(1.0, &other.b);
    }
}
