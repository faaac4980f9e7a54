//! Stacked linear layers with ReLU activations and cached forward passes.

use ndarray::{Array1, ArrayView1};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::linear::{Linear, LinearGrads};

/// A feed-forward stack. ReLU is applied between layers and, when
/// `relu_output` is set, after the last layer too — use that for trunks
/// whose output is a representation rather than logits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Linear>,
    pub relu_output: bool,
}

/// Activations recorded by [`Mlp::forward_cached`], consumed by
/// [`Mlp::backward`].
#[derive(Debug, Clone)]
pub struct MlpCache {
    input: Array1<f64>,
    /// Pre-activation output of each layer.
    pre: Vec<Array1<f64>>,
    /// Post-activation output of each layer (equal to `pre` where no ReLU
    /// applies).
    post: Vec<Array1<f64>>,
}

impl MlpCache {
    pub fn output(&self) -> ArrayView1<'_, f64> {
        self.post.last().expect("mlp has at least one layer").view()
    }
}

/// Gradient buffers for every layer of an [`Mlp`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGrads {
    pub layers: Vec<LinearGrads>,
}

impl Mlp {
    /// Build from layer widths, e.g. `[4, 128, 128]` for two hidden layers
    /// over 4 inputs.
    pub fn init(dims: &[usize], relu_output: bool, rng: &mut impl Rng) -> Self {
        assert!(dims.len() >= 2, "mlp needs at least one layer");
        let layers = dims
            .windows(2)
            .map(|w| Linear::init(w[0], w[1], rng))
            .collect();
        Mlp {
            layers,
            relu_output,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    fn relu_applies_at(&self, layer: usize) -> bool {
        layer + 1 < self.layers.len() || self.relu_output
    }

    pub fn forward(&self, x: ArrayView1<'_, f64>) -> Array1<f64> {
        let mut current = x.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            current = layer.forward(current.view());
            if self.relu_applies_at(i) {
                current.mapv_inplace(|v| v.max(0.0));
            }
        }
        current
    }

    pub fn forward_cached(&self, x: ArrayView1<'_, f64>) -> MlpCache {
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post = Vec::with_capacity(self.layers.len());
        let mut current = x.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(current.view());
            pre.push(z.clone());
            current = if self.relu_applies_at(i) {
                z.mapv(|v| v.max(0.0))
            } else {
                z
            };
            post.push(current.clone());
        }
        MlpCache {
            input: x.to_owned(),
            pre,
            post,
        }
    }

    /// Backpropagate `d_out = dL/d(output)` through the cached pass,
    /// accumulating into `grads` and returning `dL/d(input)`.
    pub fn backward(
        &self,
        cache: &MlpCache,
        d_out: ArrayView1<'_, f64>,
        grads: &mut MlpGrads,
    ) -> Array1<f64> {
        let mut delta = d_out.to_owned();
        for i in (0..self.layers.len()).rev() {
            if self.relu_applies_at(i) {
                for (d, &z) in delta.iter_mut().zip(cache.pre[i].iter()) {
                    if z <= 0.0 {
                        *d = 0.0;
                    }
                }
            }
            let input = if i == 0 {
                cache.input.view()
            } else {
                cache.post[i - 1].view()
            };
            delta = self.layers[i].backward(input, delta.view(), &mut grads.layers[i]);
        }
        delta
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Linear::param_count).sum()
    }

    pub fn write_flat(&self, out: &mut Vec<f64>) {
        for layer in &self.layers {
            layer.write_flat(out);
        }
    }

    pub fn read_flat(&mut self, data: &[f64], pos: &mut usize) {
        for layer in &mut self.layers {
            layer.read_flat(data, pos);
        }
    }
}

impl MlpGrads {
    pub fn zeros_like(mlp: &Mlp) -> Self {
        MlpGrads {
            layers: mlp.layers.iter().map(LinearGrads::zeros_like).collect(),
        }
    }

    pub fn write_flat(&self, out: &mut Vec<f64>) {
        for layer in &self.layers {
            layer.write_flat(out);
        }
    }

    pub fn add_assign(&mut self, other: &MlpGrads) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.add_assign(b);
        }
    }
}
