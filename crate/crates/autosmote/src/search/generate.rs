//! One rollout of the hierarchical generation process.
//!
//! The cross policy commits to an episode-wide scale factor, then each
//! minority instance (in ascending index order) gets its own factor from
//! the instance policy and immediately runs `episode_scale *
//! instance_scale` low-level steps, each appending one interpolated
//! sample. Usage counts advance after every low-level step, so later
//! decisions — including later instances' — observe the interpolations
//! made so far.

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::Result;
use crate::nn::{argmax, sample_categorical};
use crate::samplers::{interpolate, NeighborIndex, Provenance, SyntheticSet};

use super::policy::{LowNet, PolicyBundle, PolicyValueNet};
use super::state::{
    cross_state, instance_state, low_action_features_from_bin, UsageCounter, LAMBDA_GRID,
    USAGE_BINS,
};
use super::trajectory::{Episode, HighStep, LowStep};

/// How actions are chosen during a rollout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerateMode {
    /// Draw from the policy distributions (training rollouts).
    Sample,
    /// Take argmax actions (final replay of the best strategy).
    Greedy,
    /// Ignore the policies and draw uniformly (random-search ablation).
    Uniform,
}

fn decide_high(
    net: &PolicyValueNet,
    state: &[f64],
    mode: GenerateMode,
    rng: &mut ChaCha8Rng,
) -> Result<(usize, f64)> {
    match mode {
        GenerateMode::Uniform => {
            let n = net.n_actions();
            Ok((rng.gen_range(0..n), 1.0 / n as f64))
        }
        GenerateMode::Sample => {
            let eval = net.eval(state)?;
            let action = sample_categorical(&eval.probs, rng);
            Ok((action, eval.probs[action]))
        }
        GenerateMode::Greedy => {
            let eval = net.eval(state)?;
            let action = argmax(&eval.probs);
            Ok((action, eval.probs[action]))
        }
    }
}

fn decide_low(
    net: &LowNet,
    state: &[f64],
    candidates: &[Vec<f64>],
    mode: GenerateMode,
    rng: &mut ChaCha8Rng,
) -> Result<(usize, f64)> {
    match mode {
        GenerateMode::Uniform => {
            let n = candidates.len();
            Ok((rng.gen_range(0..n), 1.0 / n as f64))
        }
        GenerateMode::Sample => {
            let eval = net.eval(state, candidates)?;
            let action = sample_categorical(&eval.probs, rng);
            Ok((action, eval.probs[action]))
        }
        GenerateMode::Greedy => {
            let eval = net.eval(state, candidates)?;
            let action = argmax(&eval.probs);
            Ok((action, eval.probs[action]))
        }
    }
}

/// Run one episode and collect its decisions, synthetic rows, and
/// provenance. The episode comes back with reward 0 everywhere; the
/// caller scores it and calls [`Episode::set_reward`].
pub fn generate(
    bundle: &PolicyBundle,
    train: &Dataset,
    neighbors: &NeighborIndex,
    g1_max: usize,
    g2_max: usize,
    mode: GenerateMode,
    rng: &mut ChaCha8Rng,
) -> Result<Episode> {
    assert_eq!(
        bundle.state_dim(),
        train.dim() + USAGE_BINS,
        "policy state width does not match the dataset"
    );
    assert_eq!(
        bundle.cross.n_actions(),
        g1_max + 1,
        "cross policy head does not cover 0..=g1_max"
    );
    assert_eq!(
        bundle.instance.n_actions(),
        g2_max + 1,
        "instance policy head does not cover 0..=g2_max"
    );

    let n_min = neighbors.n_instances();
    let dim = train.dim();
    let mut usage = UsageCounter::new(n_min);

    let cross_obs = cross_state(train);
    let (g1, g1_prob) = decide_high(&bundle.cross, &cross_obs, mode, rng)?;
    let cross = vec![HighStep {
        state: cross_obs,
        action: g1,
        behavior_prob: g1_prob,
        reward: 0.0,
    }];

    let mut instance = Vec::with_capacity(n_min);
    let mut low = Vec::with_capacity(n_min);
    let mut goals = Vec::with_capacity(n_min);
    let mut rows: Vec<f64> = Vec::new();
    let mut provenance = Vec::new();

    for i in 0..n_min {
        let obs = instance_state(neighbors.features_of(i), usage.count(i));
        let (g2, g2_prob) = decide_high(&bundle.instance, &obs, mode, rng)?;
        instance.push(HighStep {
            state: obs,
            action: g2,
            behavior_prob: g2_prob,
            reward: 0.0,
        });
        goals.push(g2);

        let budget = g1 * g2;
        let mut steps = Vec::with_capacity(budget);
        for _ in 0..budget {
            let state = instance_state(neighbors.features_of(i), usage.count(i));
            let bins: Vec<u8> = neighbors.neighbors_of(i)
                .iter()
                .map(|&j| usage.bin(j as usize) as u8)
                .collect();
            let candidates: Vec<Vec<f64>> = bins
                .iter()
                .flat_map(|&b| {
                    (0..LAMBDA_GRID.len()).map(move |l| low_action_features_from_bin(b as usize, l))
                })
                .collect();
            let (action, prob) = decide_low(&bundle.low, &state, &candidates, mode, rng)?;

            let slot = action / LAMBDA_GRID.len();
            let lambda = LAMBDA_GRID[action % LAMBDA_GRID.len()];
            let neighbor = neighbors.neighbors_of(i)[slot] as usize;
            let sample = interpolate(
                neighbors.features_of(i),
                neighbors.features_of(neighbor),
                lambda,
            )?;
            rows.extend(sample.iter());
            provenance.push(Provenance {
                source_row: neighbors.row_of(i),
                neighbor_row: neighbors.row_of(neighbor),
                lambda,
            });
            steps.push(LowStep {
                state,
                action,
                behavior_prob: prob,
                reward: 0.0,
                neighbor_bins: bins,
            });
            usage.record(i, neighbor);
        }
        low.push(steps);
    }

    let n_rows = provenance.len();
    let samples = Array2::from_shape_vec((n_rows, dim), rows)
        .expect("row buffer length is n_rows * dim by construction");
    let synthetic = SyntheticSet::new(samples, provenance)?;
    Ok(Episode {
        cross,
        instance,
        low,
        synthetic,
        reward: 0.0,
        goals: (g1, goals),
    })
}

/// Size of the low-level action space for a given neighbor index.
pub fn low_action_count(neighbors: &NeighborIndex) -> usize {
    neighbors.list_len() * LAMBDA_GRID.len()
}
