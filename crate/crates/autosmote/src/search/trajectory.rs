//! Step and episode records produced by strategy rollouts.
//!
//! Rewards are terminal-only: every step is created with reward 0 and
//! [`Episode::set_reward`] later writes the episode's validation score
//! into the final step of each trajectory. The behavior probability of
//! the action is recorded at decision time so the learner can correct
//! for policy lag when episodes come from stale parameter snapshots.

use crate::error::{Error, Result};
use crate::samplers::SyntheticSet;

/// One decision of the cross-instance or instance-level policy.
#[derive(Debug, Clone)]
pub struct HighStep {
    /// Observation the policy acted on.
    pub state: Vec<f64>,
    /// Index of the chosen action (a scale factor in 0..=cap).
    pub action: usize,
    /// Probability the acting policy assigned to `action`.
    pub behavior_prob: f64,
    pub reward: f64,
}

/// One decision of the low-level policy.
#[derive(Debug, Clone)]
pub struct LowStep {
    /// Observation of the source instance at decision time.
    pub state: Vec<f64>,
    /// Flat action: `neighbor_slot * LAMBDA_GRID.len() + lambda_slot`.
    pub action: usize,
    pub behavior_prob: f64,
    pub reward: f64,
    /// Usage buckets of every neighbor candidate at decision time; the
    /// learner rebuilds the action descriptors from these.
    pub neighbor_bins: Vec<u8>,
}

/// Everything one rollout produced.
#[derive(Debug, Clone)]
pub struct Episode {
    /// Single decision of the episode-wide scale policy.
    pub cross: Vec<HighStep>,
    /// One decision per minority instance, in ascending instance order.
    pub instance: Vec<HighStep>,
    /// Low-level decisions grouped per minority instance; entry `i` holds
    /// the steps taken while expanding instance `i` (possibly none).
    pub low: Vec<Vec<LowStep>>,
    /// The synthetic rows those decisions produced.
    pub synthetic: SyntheticSet,
    /// Validation score of the episode's strategy; set by [`set_reward`].
    ///
    /// [`set_reward`]: Episode::set_reward
    pub reward: f64,
    /// The sampled factors `(episode_scale, per_instance_scales)`.
    pub goals: (usize, Vec<usize>),
}

impl Episode {
    /// Total low-level steps, which equals the synthetic sample count.
    pub fn n_low_steps(&self) -> usize {
        self.low.iter().map(Vec::len).sum()
    }

    /// Write the terminal reward into the last step of every trajectory.
    ///
    /// Rejects non-finite scores: a reward like that would poison every
    /// later update, so the episode must be discarded instead.
    pub fn set_reward(&mut self, reward: f64) -> Result<()> {
        if !reward.is_finite() {
            return Err(Error::runtime(format!(
                "episode reward must be finite, got {reward}"
            )));
        }
        self.reward = reward;
        if let Some(step) = self.cross.last_mut() {
            step.reward = reward;
        }
        if let Some(step) = self.instance.last_mut() {
            step.reward = reward;
        }
        for steps in &mut self.low {
            if let Some(step) = steps.last_mut() {
                step.reward = reward;
            }
        }
        Ok(())
    }
}
