//! Reinforcement-learning search over synthetic-sample strategies.
//!
//! A three-level hierarchy decides how to over-sample: a cross-instance
//! policy picks a dataset-wide scale factor once per episode, an instance
//! policy assigns each minority instance its own factor, and a low-level
//! policy composes each synthetic sample from a neighbor choice and an
//! interpolation coefficient. Episodes are scored by training a classifier
//! on the augmented data and reading a validation metric; policies improve
//! via an off-policy actor-critic update with truncated importance
//! sampling, fed by per-policy step buffers.

mod generate;
mod loss;
mod policy;
mod state;
mod train;
mod trajectory;
mod vtrace;

pub use generate::{generate, low_action_count, GenerateMode};
pub use loss::{impala_loss_high, impala_loss_low, LossBreakdown, LossParams};
pub use policy::{
    load_checkpoint, load_checkpoint_from_slice, save_checkpoint, LowNet, LowNetGrads,
    PolicyBundle, PolicyValueNet, PolicyValueGrads, TRUNK_HIDDEN,
};
pub use state::{
    cross_state, instance_state, low_action_features, low_action_features_from_bin, usage_bin,
    UsageCounter, LAMBDA_GRID, LOW_ACTION_FEATURE_DIM, USAGE_BINS,
};
pub use train::{
    random_search, reward_episode, train_search, IterationRecord, SearchResult, UpdateCounts,
};
pub use trajectory::{Episode, HighStep, LowStep};
pub use vtrace::vtrace_targets;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

fn default_g2() -> usize {
    10
}
fn default_k() -> usize {
    30
}
fn default_iterations() -> usize {
    1000
}
fn default_buffer_cross() -> usize {
    2
}
fn default_buffer_instance() -> usize {
    300
}
fn default_buffer_low() -> usize {
    300
}
fn default_gamma() -> f64 {
    1.0
}
fn default_rho_bar() -> f64 {
    1.0
}
fn default_c_bar() -> f64 {
    1.0
}
fn default_entropy_coef() -> f64 {
    0.01
}
fn default_learning_rate() -> f64 {
    0.005
}
fn default_grad_clip() -> f64 {
    40.0
}
fn default_actors() -> usize {
    1
}
fn default_scorer_hidden() -> usize {
    64
}

/// Hyperparameters of the strategy search.
///
/// `g1_max` has no serde default because its recommended value depends on
/// the training data (see [`SearchConfig::defaults_for`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    /// Cross-instance scale cap: the episode-wide factor is in 0..=g1_max.
    pub g1_max: usize,
    /// Per-instance scale cap: each instance's factor is in 0..=g2_max.
    #[serde(default = "default_g2")]
    pub g2_max: usize,
    /// Neighbor candidates per minority instance (clipped to N_min - 1).
    #[serde(default = "default_k")]
    pub k: usize,
    /// Episodes to run.
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    /// Step thresholds that trigger one update of the matching policy.
    #[serde(default = "default_buffer_cross")]
    pub buffer_cross: usize,
    #[serde(default = "default_buffer_instance")]
    pub buffer_instance: usize,
    #[serde(default = "default_buffer_low")]
    pub buffer_low: usize,
    /// Discount; 1.0 because episodes are short with terminal-only reward.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Truncation levels for the importance weights.
    #[serde(default = "default_rho_bar")]
    pub rho_bar: f64,
    #[serde(default = "default_c_bar")]
    pub c_bar: f64,
    /// Entropy bonus weight; 0 disables the bonus.
    #[serde(default = "default_entropy_coef")]
    pub entropy_coef: f64,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    /// Global gradient-norm clip applied before each optimizer step.
    #[serde(default = "default_grad_clip")]
    pub grad_clip: f64,
    /// Parallel episode generators; 1 runs inline and bit-deterministically.
    #[serde(default = "default_actors")]
    pub actors: usize,
    /// Hidden width of the low-level action scorer.
    #[serde(default = "default_scorer_hidden")]
    pub scorer_hidden: usize,
}

impl SearchConfig {
    /// Defaults tuned to `train`: `g1_max = ceil(4·IR / g2_max)`, so the
    /// search can over-sample up to roughly four times the majority count.
    pub fn defaults_for(train: &Dataset) -> SearchConfig {
        let g2_max = default_g2();
        let ir = train.imbalance_ratio();
        let g1_max = ((4.0 * ir / g2_max as f64).ceil() as usize).max(1);
        SearchConfig {
            g1_max,
            g2_max,
            k: default_k(),
            iterations: default_iterations(),
            buffer_cross: default_buffer_cross(),
            buffer_instance: default_buffer_instance(),
            buffer_low: default_buffer_low(),
            gamma: default_gamma(),
            rho_bar: default_rho_bar(),
            c_bar: default_c_bar(),
            entropy_coef: default_entropy_coef(),
            learning_rate: default_learning_rate(),
            grad_clip: default_grad_clip(),
            actors: default_actors(),
            scorer_hidden: default_scorer_hidden(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("g1_max", self.g1_max),
            ("g2_max", self.g2_max),
            ("k", self.k),
            ("iterations", self.iterations),
            ("buffer_cross", self.buffer_cross),
            ("buffer_instance", self.buffer_instance),
            ("buffer_low", self.buffer_low),
            ("actors", self.actors),
            ("scorer_hidden", self.scorer_hidden),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::config(format!("search.{name} must be >= 1")));
            }
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::config("search.gamma must be in [0, 1]"));
        }
        for (name, value) in [("rho_bar", self.rho_bar), ("c_bar", self.c_bar)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::config(format!("search.{name} must be >= 0")));
            }
        }
        if !(self.entropy_coef.is_finite() && self.entropy_coef >= 0.0) {
            return Err(Error::config("search.entropy_coef must be >= 0"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::config("search.learning_rate must be > 0"));
        }
        if !(self.grad_clip.is_finite() && self.grad_clip > 0.0) {
            return Err(Error::config("search.grad_clip must be > 0"));
        }
        Ok(())
    }
}
