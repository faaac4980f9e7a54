//! Actor-critic loss over buffered trajectories.
//!
//! Per step, three terms are minimized:
//!
//! * policy: `-rho_t * log pi(a_t|s_t) * (r_t + gamma * v(t+1) - V(s_t))`,
//!   with the truncated ratio `rho_t`, the value target `v`, and `V(s_t)`
//!   all held constant — only `log pi` carries gradient;
//! * value: `0.5 * (v(t) - V(s_t))^2`, with `v(t)` held constant;
//! * entropy bonus: `-entropy_coef * H(pi(.|s_t))`, fully differentiated.
//!
//! Gradients are closed-form at the network outputs — for the policy part
//! `coef * (p - onehot(a))` on the logits, for the value part `V - v` on
//! the value output — and the networks backpropagate from there. Terms
//! are summed, not averaged, over every step in the batch.

use crate::error::{Error, Result};
use crate::nn::entropy;

use super::policy::{LowNet, LowNetGrads, PolicyValueNet, PolicyValueGrads};
use super::state::{low_action_features_from_bin, LAMBDA_GRID};
use super::trajectory::{HighStep, LowStep};
use super::vtrace::vtrace_targets;
use super::SearchConfig;

/// Scalars the loss needs from the search configuration.
#[derive(Debug, Clone, Copy)]
pub struct LossParams {
    pub gamma: f64,
    pub rho_bar: f64,
    pub c_bar: f64,
    pub entropy_coef: f64,
}

impl From<&SearchConfig> for LossParams {
    fn from(cfg: &SearchConfig) -> LossParams {
        LossParams {
            gamma: cfg.gamma,
            rho_bar: cfg.rho_bar,
            c_bar: cfg.c_bar,
            entropy_coef: cfg.entropy_coef,
        }
    }
}

/// Loss components of one batch; `total = policy + value - coef * entropy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub total: f64,
    pub policy: f64,
    pub value: f64,
    /// Summed raw policy entropy (before weighting).
    pub entropy: f64,
    /// Steps that contributed.
    pub steps: usize,
}

struct StepGrad {
    d_logits: Vec<f64>,
    d_value: f64,
}

struct Accumulator {
    policy: f64,
    value: f64,
    entropy: f64,
    steps: usize,
    entropy_coef: f64,
}

impl Accumulator {
    fn new(entropy_coef: f64) -> Accumulator {
        Accumulator {
            policy: 0.0,
            value: 0.0,
            entropy: 0.0,
            steps: 0,
            entropy_coef,
        }
    }

    /// Fold in one step: probabilities and value from the current network,
    /// the picked action, its truncated-weighted advantage coefficient,
    /// and the frozen value target.
    fn step(
        &mut self,
        probs: &[f64],
        action: usize,
        coef: f64,
        value: f64,
        target: f64,
    ) -> StepGrad {
        let pi_a = probs[action];
        // coef = 0 contributes nothing even when pi underflowed to zero.
        self.policy += if coef == 0.0 { 0.0 } else { -coef * pi_a.ln() };
        self.value += 0.5 * (target - value) * (target - value);
        let h = entropy(probs);
        self.entropy += h;
        self.steps += 1;

        let beta = self.entropy_coef;
        let mut d_logits: Vec<f64> = probs
            .iter()
            .map(|&p| {
                let mut d = coef * p;
                if beta != 0.0 && p > 0.0 {
                    d += beta * p * (p.ln() + h);
                }
                d
            })
            .collect();
        d_logits[action] -= coef;
        StepGrad {
            d_logits,
            d_value: value - target,
        }
    }

    fn finish(self) -> Result<LossBreakdown> {
        if self.steps == 0 {
            return Err(Error::Numerical(
                "loss over a batch with no steps".to_string(),
            ));
        }
        let total = self.policy + self.value - self.entropy_coef * self.entropy;
        if !total.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite loss (policy {}, value {}, entropy {})",
                self.policy, self.value, self.entropy
            )));
        }
        Ok(LossBreakdown {
            total,
            policy: self.policy,
            value: self.value,
            entropy: self.entropy,
            steps: self.steps,
        })
    }
}

/// Per-step frozen coefficients for one trajectory.
fn step_coefficients(
    rewards: &[f64],
    values: &[f64],
    mu: &[f64],
    pi: &[f64],
    params: &LossParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let targets = vtrace_targets(
        rewards,
        values,
        mu,
        pi,
        params.gamma,
        params.rho_bar,
        params.c_bar,
    )?;
    let n = rewards.len();
    let coefs = (0..n)
        .map(|t| {
            let rho = (pi[t] / mu[t]).min(params.rho_bar);
            let next = if t + 1 < n { targets[t + 1] } else { 0.0 };
            rho * (rewards[t] + params.gamma * next - values[t])
        })
        .collect();
    Ok((targets, coefs))
}

/// Loss and gradients for a batch of cross- or instance-level trajectories.
pub fn impala_loss_high(
    net: &PolicyValueNet,
    batch: &[Vec<HighStep>],
    params: &LossParams,
) -> Result<(LossBreakdown, PolicyValueGrads)> {
    let mut grads = PolicyValueGrads::zeros_like(net);
    let mut acc = Accumulator::new(params.entropy_coef);
    for traj in batch {
        if traj.is_empty() {
            continue;
        }
        let evals = traj
            .iter()
            .map(|s| net.eval(&s.state))
            .collect::<Result<Vec<_>>>()?;
        let rewards: Vec<f64> = traj.iter().map(|s| s.reward).collect();
        let mu: Vec<f64> = traj.iter().map(|s| s.behavior_prob).collect();
        let pi: Vec<f64> = evals
            .iter()
            .zip(traj)
            .map(|(e, s)| e.probs[s.action])
            .collect();
        let values: Vec<f64> = evals.iter().map(|e| e.value).collect();
        let (targets, coefs) = step_coefficients(&rewards, &values, &mu, &pi, params)?;
        for (t, (step, eval)) in traj.iter().zip(&evals).enumerate() {
            let g = acc.step(&eval.probs, step.action, coefs[t], values[t], targets[t]);
            net.backward(eval, &g.d_logits, g.d_value, &mut grads);
        }
    }
    Ok((acc.finish()?, grads))
}

/// Loss and gradients for a batch of low-level trajectories.
pub fn impala_loss_low(
    net: &LowNet,
    batch: &[Vec<LowStep>],
    params: &LossParams,
) -> Result<(LossBreakdown, LowNetGrads)> {
    let mut grads = LowNetGrads::zeros_like(net);
    let mut acc = Accumulator::new(params.entropy_coef);
    for traj in batch {
        if traj.is_empty() {
            continue;
        }
        // Candidate descriptors exactly as the actor saw them: rebuilt
        // from the usage buckets recorded at decision time.
        let candidates: Vec<Vec<Vec<f64>>> = traj
            .iter()
            .map(|s| {
                s.neighbor_bins
                    .iter()
                    .flat_map(|&b| {
                        (0..LAMBDA_GRID.len())
                            .map(move |l| low_action_features_from_bin(b as usize, l))
                    })
                    .collect()
            })
            .collect();
        let evals = traj
            .iter()
            .zip(&candidates)
            .map(|(s, c)| net.eval(&s.state, c))
            .collect::<Result<Vec<_>>>()?;
        let rewards: Vec<f64> = traj.iter().map(|s| s.reward).collect();
        let mu: Vec<f64> = traj.iter().map(|s| s.behavior_prob).collect();
        let pi: Vec<f64> = evals
            .iter()
            .zip(traj)
            .map(|(e, s)| e.probs[s.action])
            .collect();
        let values: Vec<f64> = evals.iter().map(|e| e.value).collect();
        let (targets, coefs) = step_coefficients(&rewards, &values, &mu, &pi, params)?;
        for (t, (step, eval)) in traj.iter().zip(&evals).enumerate() {
            let g = acc.step(&eval.probs, step.action, coefs[t], values[t], targets[t]);
            net.backward(eval, &candidates[t], &g.d_logits, g.d_value, &mut grads);
        }
    }
    Ok((acc.finish()?, grads))
}
