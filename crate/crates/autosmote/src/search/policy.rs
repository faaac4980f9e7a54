//! The three policy-value networks and their parameter plumbing.
//!
//! The cross-instance and instance-level policies share one architecture:
//! a ReLU trunk feeding a softmax policy head over a fixed action count
//! plus a scalar value head. The low-level policy scores a variable number
//! of candidate actions instead: the trunk representation is concatenated
//! with each candidate's descriptor and pushed through a small two-layer
//! scorer whose scalar outputs become the logits. That keeps one set of
//! scorer weights shared across however many (neighbor, coefficient)
//! pairs the dataset admits.
//!
//! Gradient entry points take `d_logits`/`d_value` — the derivative of a
//! scalar loss with respect to this network's raw outputs — and accumulate
//! parameter gradients, so the loss code owns all policy-gradient algebra
//! and the networks own only backpropagation.

use std::path::Path;

use ndarray::{s, Array1, Array2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::nn::{softmax, Checkpoint, Linear, LinearGrads, Mlp, MlpCache, MlpGrads};

use super::state::LOW_ACTION_FEATURE_DIM;

/// Width of both trunk hidden layers.
pub const TRUNK_HIDDEN: usize = 128;

/// Policy + value network over a fixed discrete action set.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyValueNet {
    pub trunk: Mlp,
    pub policy_head: Linear,
    pub value_head: Linear,
}

/// Cached forward pass of a [`PolicyValueNet`].
#[derive(Debug, Clone)]
pub struct PolicyValueEval {
    cache: MlpCache,
    pub logits: Vec<f64>,
    pub probs: Vec<f64>,
    pub value: f64,
}

/// Gradient buffers matching a [`PolicyValueNet`].
#[derive(Debug, Clone)]
pub struct PolicyValueGrads {
    pub trunk: MlpGrads,
    pub policy: LinearGrads,
    pub value: LinearGrads,
}

impl PolicyValueNet {
    pub fn new(state_dim: usize, n_actions: usize, rng: &mut impl Rng) -> PolicyValueNet {
        assert!(state_dim >= 1 && n_actions >= 1);
        PolicyValueNet {
            trunk: Mlp::init(&[state_dim, TRUNK_HIDDEN, TRUNK_HIDDEN], true, rng),
            policy_head: Linear::init(TRUNK_HIDDEN, n_actions, rng),
            value_head: Linear::init(TRUNK_HIDDEN, 1, rng),
        }
    }

    pub fn state_dim(&self) -> usize {
        self.trunk.in_dim()
    }

    pub fn n_actions(&self) -> usize {
        self.policy_head.out_dim()
    }

    /// Forward pass producing action probabilities and the state value.
    pub fn eval(&self, state: &[f64]) -> Result<PolicyValueEval> {
        if state.len() != self.state_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.state_dim(),
                got: state.len(),
            });
        }
        let cache = self
            .trunk
            .forward_cached(Array1::from_vec(state.to_vec()).view());
        let repr = cache.output();
        let logits = self.policy_head.forward(repr).to_vec();
        let probs = softmax(&logits)?;
        let value = self.value_head.forward(repr)[0];
        Ok(PolicyValueEval {
            cache,
            logits,
            probs,
            value,
        })
    }

    /// Accumulate parameter gradients given output gradients.
    pub fn backward(
        &self,
        eval: &PolicyValueEval,
        d_logits: &[f64],
        d_value: f64,
        grads: &mut PolicyValueGrads,
    ) {
        assert_eq!(d_logits.len(), self.n_actions());
        let repr = eval.cache.output();
        let mut d_repr = self.policy_head.backward(
            repr,
            Array1::from_vec(d_logits.to_vec()).view(),
            &mut grads.policy,
        );
        let d_repr_value =
            self.value_head
                .backward(repr, Array1::from_vec(vec![d_value]).view(), &mut grads.value);
        d_repr += &d_repr_value;
        self.trunk.backward(&eval.cache, d_repr.view(), &mut grads.trunk);
    }

    pub fn param_count(&self) -> usize {
        self.trunk.param_count() + self.policy_head.param_count() + self.value_head.param_count()
    }

    pub fn write_flat(&self, out: &mut Vec<f64>) {
        self.trunk.write_flat(out);
        self.policy_head.write_flat(out);
        self.value_head.write_flat(out);
    }

    pub fn read_flat(&mut self, data: &[f64], pos: &mut usize) {
        self.trunk.read_flat(data, pos);
        self.policy_head.read_flat(data, pos);
        self.value_head.read_flat(data, pos);
    }
}

impl PolicyValueGrads {
    pub fn zeros_like(net: &PolicyValueNet) -> PolicyValueGrads {
        PolicyValueGrads {
            trunk: MlpGrads::zeros_like(&net.trunk),
            policy: LinearGrads::zeros_like(&net.policy_head),
            value: LinearGrads::zeros_like(&net.value_head),
        }
    }

    pub fn write_flat(&self, out: &mut Vec<f64>) {
        self.trunk.write_flat(out);
        self.policy.write_flat(out);
        self.value.write_flat(out);
    }
}

/// Low-level policy: trunk representation + per-candidate action scorer.
#[derive(Debug, Clone, PartialEq)]
pub struct LowNet {
    pub trunk: Mlp,
    /// First scorer layer over `representation ++ action descriptor`.
    pub scorer_hidden: Linear,
    /// Second scorer layer collapsing the hidden vector to one logit.
    pub scorer_out: Linear,
    pub value_head: Linear,
}

/// Cached forward pass of a [`LowNet`] over one candidate set.
#[derive(Debug, Clone)]
pub struct LowEval {
    cache: MlpCache,
    /// Pre-activation scorer hidden vector per candidate.
    hidden_pre: Vec<Array1<f64>>,
    pub logits: Vec<f64>,
    pub probs: Vec<f64>,
    pub value: f64,
}

/// Gradient buffers matching a [`LowNet`].
#[derive(Debug, Clone)]
pub struct LowNetGrads {
    pub trunk: MlpGrads,
    pub scorer_hidden: LinearGrads,
    pub scorer_out: LinearGrads,
    pub value: LinearGrads,
}

impl LowNet {
    pub fn new(state_dim: usize, scorer_hidden: usize, rng: &mut impl Rng) -> LowNet {
        assert!(state_dim >= 1 && scorer_hidden >= 1);
        LowNet {
            trunk: Mlp::init(&[state_dim, TRUNK_HIDDEN, TRUNK_HIDDEN], true, rng),
            scorer_hidden: Linear::init(TRUNK_HIDDEN + LOW_ACTION_FEATURE_DIM, scorer_hidden, rng),
            scorer_out: Linear::init(scorer_hidden, 1, rng),
            value_head: Linear::init(TRUNK_HIDDEN, 1, rng),
        }
    }

    pub fn state_dim(&self) -> usize {
        self.trunk.in_dim()
    }

    fn repr_dim(&self) -> usize {
        self.trunk.out_dim()
    }

    /// Forward pass over `candidates` action descriptors, yielding one
    /// logit per candidate, softmax probabilities, and the state value.
    pub fn eval(&self, state: &[f64], candidates: &[Vec<f64>]) -> Result<LowEval> {
        if state.len() != self.state_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.state_dim(),
                got: state.len(),
            });
        }
        if candidates.is_empty() {
            return Err(Error::Numerical(
                "low-level policy needs at least one candidate action".to_string(),
            ));
        }
        let repr_dim = self.repr_dim();
        let cache = self
            .trunk
            .forward_cached(Array1::from_vec(state.to_vec()).view());
        let repr = cache.output();

        // The representation part of the first scorer layer is identical
        // for every candidate; compute it once and add each candidate's
        // descriptor columns on top. Descriptors are sparse one-hots, so
        // only their non-zero entries touch the weight matrix.
        let base = self.scorer_hidden.w.slice(s![.., ..repr_dim]).dot(&repr)
            + &self.scorer_hidden.b;
        let mut hidden_pre = Vec::with_capacity(candidates.len());
        let mut logits = Vec::with_capacity(candidates.len());
        for feats in candidates {
            assert_eq!(feats.len(), LOW_ACTION_FEATURE_DIM);
            let mut pre = base.clone();
            for (j, &f) in feats.iter().enumerate() {
                if f != 0.0 {
                    pre.scaled_add(f, &self.scorer_hidden.w.column(repr_dim + j));
                }
            }
            let hidden = pre.mapv(|v| v.max(0.0));
            logits.push(self.scorer_out.forward(hidden.view())[0]);
            hidden_pre.push(pre);
        }
        let probs = softmax(&logits)?;
        let value = self.value_head.forward(repr)[0];
        Ok(LowEval {
            cache,
            hidden_pre,
            logits,
            probs,
            value,
        })
    }

    /// Accumulate parameter gradients. `candidates` must be the same
    /// descriptors the eval saw.
    pub fn backward(
        &self,
        eval: &LowEval,
        candidates: &[Vec<f64>],
        d_logits: &[f64],
        d_value: f64,
        grads: &mut LowNetGrads,
    ) {
        assert_eq!(candidates.len(), eval.hidden_pre.len());
        assert_eq!(d_logits.len(), eval.hidden_pre.len());
        let repr_dim = self.repr_dim();
        let repr = eval.cache.output();
        let scorer_out_w = self.scorer_out.w.row(0);

        // Sum of per-candidate pre-activation gradients: the shared
        // representation columns see the summed gradient because every
        // candidate fed the same representation.
        let mut sum_d_pre = Array1::<f64>::zeros(self.scorer_hidden.out_dim());
        for ((feats, pre), &g) in candidates.iter().zip(&eval.hidden_pre).zip(d_logits) {
            if g == 0.0 {
                continue;
            }
            let hidden = pre.mapv(|v| v.max(0.0));
            grads.scorer_out.w.row_mut(0).scaled_add(g, &hidden);
            grads.scorer_out.b[0] += g;
            let mut d_pre = scorer_out_w.to_owned() * g;
            for (d, &z) in d_pre.iter_mut().zip(pre.iter()) {
                if z <= 0.0 {
                    *d = 0.0;
                }
            }
            grads.scorer_hidden.b += &d_pre;
            for (j, &f) in feats.iter().enumerate() {
                if f != 0.0 {
                    grads
                        .scorer_hidden
                        .w
                        .column_mut(repr_dim + j)
                        .scaled_add(f, &d_pre);
                }
            }
            sum_d_pre += &d_pre;
        }
        for (mut row, &g) in grads
            .scorer_hidden
            .w
            .slice_mut(s![.., ..repr_dim])
            .rows_mut()
            .into_iter()
            .zip(sum_d_pre.iter())
        {
            row.scaled_add(g, &repr);
        }
        let mut d_repr = self
            .scorer_hidden
            .w
            .slice(s![.., ..repr_dim])
            .t()
            .dot(&sum_d_pre);

        let d_repr_value =
            self.value_head
                .backward(repr, Array1::from_vec(vec![d_value]).view(), &mut grads.value);
        d_repr += &d_repr_value;
        self.trunk.backward(&eval.cache, d_repr.view(), &mut grads.trunk);
    }

    pub fn param_count(&self) -> usize {
        self.trunk.param_count()
            + self.scorer_hidden.param_count()
            + self.scorer_out.param_count()
            + self.value_head.param_count()
    }

    pub fn write_flat(&self, out: &mut Vec<f64>) {
        self.trunk.write_flat(out);
        self.scorer_hidden.write_flat(out);
        self.scorer_out.write_flat(out);
        self.value_head.write_flat(out);
    }

    pub fn read_flat(&mut self, data: &[f64], pos: &mut usize) {
        self.trunk.read_flat(data, pos);
        self.scorer_hidden.read_flat(data, pos);
        self.scorer_out.read_flat(data, pos);
        self.value_head.read_flat(data, pos);
    }
}

impl LowNetGrads {
    pub fn zeros_like(net: &LowNet) -> LowNetGrads {
        LowNetGrads {
            trunk: MlpGrads::zeros_like(&net.trunk),
            scorer_hidden: LinearGrads::zeros_like(&net.scorer_hidden),
            scorer_out: LinearGrads::zeros_like(&net.scorer_out),
            value: LinearGrads::zeros_like(&net.value_head),
        }
    }

    pub fn write_flat(&self, out: &mut Vec<f64>) {
        self.trunk.write_flat(out);
        self.scorer_hidden.write_flat(out);
        self.scorer_out.write_flat(out);
        self.value.write_flat(out);
    }
}

/// The three policies of the hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyBundle {
    pub cross: PolicyValueNet,
    pub instance: PolicyValueNet,
    pub low: LowNet,
}

impl PolicyBundle {
    /// Initialize all three networks over a shared state width.
    pub fn new(
        state_dim: usize,
        n_cross_actions: usize,
        n_instance_actions: usize,
        scorer_hidden: usize,
        rng: &mut impl Rng,
    ) -> PolicyBundle {
        PolicyBundle {
            cross: PolicyValueNet::new(state_dim, n_cross_actions, rng),
            instance: PolicyValueNet::new(state_dim, n_instance_actions, rng),
            low: LowNet::new(state_dim, scorer_hidden, rng),
        }
    }

    pub fn state_dim(&self) -> usize {
        self.cross.state_dim()
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        let mut ckpt = Checkpoint::new();
        push_mlp(&mut ckpt, "cross.trunk", &self.cross.trunk);
        push_linear(&mut ckpt, "cross.policy", &self.cross.policy_head);
        push_linear(&mut ckpt, "cross.value", &self.cross.value_head);
        push_mlp(&mut ckpt, "instance.trunk", &self.instance.trunk);
        push_linear(&mut ckpt, "instance.policy", &self.instance.policy_head);
        push_linear(&mut ckpt, "instance.value", &self.instance.value_head);
        push_mlp(&mut ckpt, "low.trunk", &self.low.trunk);
        push_linear(&mut ckpt, "low.scorer_hidden", &self.low.scorer_hidden);
        push_linear(&mut ckpt, "low.scorer_out", &self.low.scorer_out);
        push_linear(&mut ckpt, "low.value", &self.low.value_head);
        ckpt
    }

    /// Rebuild a bundle from stored tensors. Shapes are taken from the
    /// checkpoint itself and cross-checked for internal consistency.
    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<PolicyBundle> {
        let cross_trunk = read_mlp(ckpt, "cross.trunk")?;
        let cross = PolicyValueNet {
            policy_head: read_linear(ckpt, "cross.policy", cross_trunk.out_dim(), None)?,
            value_head: read_linear(ckpt, "cross.value", cross_trunk.out_dim(), Some(1))?,
            trunk: cross_trunk,
        };
        let instance_trunk = read_mlp(ckpt, "instance.trunk")?;
        let instance = PolicyValueNet {
            policy_head: read_linear(ckpt, "instance.policy", instance_trunk.out_dim(), None)?,
            value_head: read_linear(ckpt, "instance.value", instance_trunk.out_dim(), Some(1))?,
            trunk: instance_trunk,
        };
        let low_trunk = read_mlp(ckpt, "low.trunk")?;
        let scorer_hidden = read_linear(
            ckpt,
            "low.scorer_hidden",
            low_trunk.out_dim() + LOW_ACTION_FEATURE_DIM,
            None,
        )?;
        let scorer_out = read_linear(ckpt, "low.scorer_out", scorer_hidden.out_dim(), Some(1))?;
        let low = LowNet {
            value_head: read_linear(ckpt, "low.value", low_trunk.out_dim(), Some(1))?,
            trunk: low_trunk,
            scorer_hidden,
            scorer_out,
        };
        if cross.state_dim() != instance.state_dim() || cross.state_dim() != low.state_dim() {
            return Err(Error::runtime(
                "checkpoint policies disagree on the state width",
            ));
        }
        Ok(PolicyBundle {
            cross,
            instance,
            low,
        })
    }
}

fn push_linear(ckpt: &mut Checkpoint, name: &str, layer: &Linear) {
    ckpt.push(
        &format!("{name}.w"),
        vec![layer.out_dim(), layer.in_dim()],
        layer.w.iter().copied().collect(),
    );
    ckpt.push(
        &format!("{name}.b"),
        vec![layer.out_dim()],
        layer.b.to_vec(),
    );
}

fn push_mlp(ckpt: &mut Checkpoint, prefix: &str, mlp: &Mlp) {
    for (i, layer) in mlp.layers.iter().enumerate() {
        push_linear(ckpt, &format!("{prefix}{i}"), layer);
    }
}

/// Read one linear layer, taking the output width from the stored shape.
/// `in_dim` is demanded exactly; `out_dim` too when the architecture pins
/// it (scalar heads).
fn read_linear(
    ckpt: &Checkpoint,
    name: &str,
    in_dim: usize,
    out_dim: Option<usize>,
) -> Result<Linear> {
    let w_name = format!("{name}.w");
    let w_entry = ckpt
        .find(&w_name)
        .ok_or_else(|| Error::runtime(format!("checkpoint is missing tensor {w_name:?}")))?;
    let &[rows, cols] = w_entry.shape.as_slice() else {
        return Err(Error::runtime(format!(
            "checkpoint tensor {w_name:?} must be rank 2, got shape {:?}",
            w_entry.shape
        )));
    };
    if cols != in_dim || rows == 0 {
        return Err(Error::runtime(format!(
            "checkpoint tensor {w_name:?} has shape {:?}, expected [_, {in_dim}]",
            w_entry.shape
        )));
    }
    if let Some(expect) = out_dim {
        if rows != expect {
            return Err(Error::runtime(format!(
                "checkpoint tensor {w_name:?} has {rows} rows, expected {expect}"
            )));
        }
    }
    let b = ckpt.tensor(&format!("{name}.b"), &[rows])?;
    let w = Array2::from_shape_vec((rows, cols), w_entry.data.clone())
        .expect("shape was validated against the data length");
    Ok(Linear {
        w,
        b: Array1::from_vec(b.data.clone()),
    })
}

/// Read a two-hidden-layer ReLU trunk.
fn read_mlp(ckpt: &Checkpoint, prefix: &str) -> Result<Mlp> {
    let first_name = format!("{prefix}0.w");
    let first = ckpt
        .find(&first_name)
        .ok_or_else(|| Error::runtime(format!("checkpoint is missing tensor {first_name:?}")))?;
    let &[_, state_dim] = first.shape.as_slice() else {
        return Err(Error::runtime(format!(
            "checkpoint tensor {first_name:?} must be rank 2, got shape {:?}",
            first.shape
        )));
    };
    let layer0 = read_linear(ckpt, &format!("{prefix}0"), state_dim, None)?;
    let layer1 = read_linear(ckpt, &format!("{prefix}1"), layer0.out_dim(), None)?;
    Ok(Mlp {
        layers: vec![layer0, layer1],
        relu_output: true,
    })
}

/// Write the bundle to `path` in the versioned tensor format.
pub fn save_checkpoint(bundle: &PolicyBundle, path: &Path) -> Result<()> {
    bundle.to_checkpoint().save(path)
}

/// Load a bundle previously written by [`save_checkpoint`].
pub fn load_checkpoint(path: &Path) -> Result<PolicyBundle> {
    PolicyBundle::from_checkpoint(&Checkpoint::load(path)?)
}

/// Rebuild a bundle from checkpoint bytes already in memory.
pub fn load_checkpoint_from_slice(bytes: &[u8]) -> Result<PolicyBundle> {
    PolicyBundle::from_checkpoint(&Checkpoint::from_slice(bytes)?)
}
