//! The search loop: roll out episodes, score them on validation data,
//! buffer their trajectories, and update each policy on its own cadence.
//!
//! Each of the three policies owns a queue of episode trajectories and a
//! step threshold. Once a queue holds at least that many steps, whole
//! episodes are popped oldest-first until the popped steps reach the
//! threshold, and one optimizer update runs on that batch. A failed
//! episode or a non-finite loss is recorded and skipped; the search keeps
//! going.
//!
//! With one actor everything runs inline and is bit-reproducible for a
//! fixed seed. With more, actor threads roll out and score episodes
//! against parameter snapshots taken at dispatch time, and the learner
//! serializes all parameter updates; the importance weights in the loss
//! absorb the snapshot lag. Episode seeds are assigned by iteration
//! index, not by actor, so the rollouts themselves stay seed-stable.

use std::collections::VecDeque;
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread;

use serde::{Deserialize, Serialize};

use crate::classifiers::{evaluate, fit, ClassifierSpec};
use crate::data::SplitDataset;
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::nn::Adam;
use crate::rng::SeedTree;
use crate::samplers::{NeighborIndex, SyntheticSet};

use super::generate::{generate, GenerateMode};
use super::loss::{impala_loss_high, impala_loss_low, LossParams};
use super::policy::{LowNet, PolicyBundle, PolicyValueNet};
use super::state::USAGE_BINS;
use super::trajectory::{Episode, HighStep, LowStep};
use super::SearchConfig;

/// Train a classifier on the augmented training set and score it on the
/// validation partition. This is the episode reward.
pub fn reward_episode(
    synthetic: &SyntheticSet,
    split: &SplitDataset,
    spec: &ClassifierSpec,
    metric: Metric,
) -> Result<f64> {
    let augmented = synthetic.augment(&split.train)?;
    let model = fit(spec, &augmented)?;
    evaluate(&model, &split.validation, metric)
}

/// One scored iteration of the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Validation score of this iteration's strategy.
    pub reward: f64,
    pub synthetic_count: usize,
    /// Best validation score seen up to and including this iteration.
    pub best_so_far: f64,
}

/// How many optimizer updates each policy received.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateCounts {
    pub cross: usize,
    pub instance: usize,
    pub low: usize,
    /// Updates abandoned because the loss or gradient was not finite.
    pub skipped: usize,
}

/// Outcome of a search run.
#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Synthetic samples of the best-scoring iteration.
    pub best_synthetic: SyntheticSet,
    /// Its validation score.
    pub best_validation: f64,
    /// Which iteration produced it.
    pub best_iteration: usize,
    /// One record per scored iteration, in iteration order.
    pub history: Vec<IterationRecord>,
    pub updates: UpdateCounts,
    /// Iterations that errored before producing a score.
    pub failed_iterations: usize,
    /// Human-readable notes for every skipped update or failed iteration.
    pub incidents: Vec<String>,
    /// Final policy parameters, for checkpointing.
    pub bundle: PolicyBundle,
    /// Echo of the configuration and seed that produced this result.
    pub config: SearchConfig,
    pub seed: u64,
}

/// Queue of per-episode trajectory groups with a running step count.
struct StepBuffer<T> {
    episodes: VecDeque<(usize, T)>,
    steps: usize,
}

impl<T> StepBuffer<T> {
    fn new() -> StepBuffer<T> {
        StepBuffer {
            episodes: VecDeque::new(),
            steps: 0,
        }
    }

    fn push(&mut self, steps: usize, item: T) {
        self.steps += steps;
        self.episodes.push_back((steps, item));
    }

    /// Pop whole episodes, oldest first, until at least `threshold` steps
    /// have been removed. Call only when `self.steps >= threshold`.
    fn pop_batch(&mut self, threshold: usize) -> Vec<T> {
        debug_assert!(self.steps >= threshold);
        let mut popped = 0;
        let mut batch = Vec::new();
        while popped < threshold {
            let (steps, item) = self
                .episodes
                .pop_front()
                .expect("buffer holds >= threshold steps");
            popped += steps;
            batch.push(item);
        }
        self.steps -= popped;
        batch
    }
}

/// Learner-side state for one policy level.
struct PolicyUpdater<B> {
    adam: Adam,
    buffer: StepBuffer<B>,
    threshold: usize,
}

impl<B> PolicyUpdater<B> {
    fn new(param_count: usize, learning_rate: f64, threshold: usize) -> PolicyUpdater<B> {
        PolicyUpdater {
            adam: Adam::new(param_count, learning_rate),
            buffer: StepBuffer::new(),
            threshold,
        }
    }
}

/// Apply one Adam update given flat parameters and gradients; report
/// whether it was applied.
fn apply_step(
    adam: &mut Adam,
    params: &mut Vec<f64>,
    grads: &[f64],
    clip: f64,
) -> std::result::Result<(), String> {
    let report = adam.step(params, grads, Some(clip));
    if report.skipped {
        Err("non-finite gradient".to_string())
    } else {
        Ok(())
    }
}

fn update_high(
    net: &mut PolicyValueNet,
    updater: &mut PolicyUpdater<Vec<HighStep>>,
    params: &LossParams,
    clip: f64,
) -> std::result::Result<(), String> {
    let batch = updater.buffer.pop_batch(updater.threshold);
    let (_, grads) = impala_loss_high(net, &batch, params).map_err(|e| e.to_string())?;
    let mut flat_params = Vec::with_capacity(net.param_count());
    net.write_flat(&mut flat_params);
    let mut flat_grads = Vec::with_capacity(net.param_count());
    grads.write_flat(&mut flat_grads);
    apply_step(&mut updater.adam, &mut flat_params, &flat_grads, clip)?;
    let mut pos = 0;
    net.read_flat(&flat_params, &mut pos);
    Ok(())
}

fn update_low(
    net: &mut LowNet,
    updater: &mut PolicyUpdater<Vec<Vec<LowStep>>>,
    params: &LossParams,
    clip: f64,
) -> std::result::Result<(), String> {
    let batch: Vec<Vec<LowStep>> = updater
        .buffer
        .pop_batch(updater.threshold)
        .into_iter()
        .flatten()
        .collect();
    let (_, grads) = impala_loss_low(net, &batch, params).map_err(|e| e.to_string())?;
    let mut flat_params = Vec::with_capacity(net.param_count());
    net.write_flat(&mut flat_params);
    let mut flat_grads = Vec::with_capacity(net.param_count());
    grads.write_flat(&mut flat_grads);
    apply_step(&mut updater.adam, &mut flat_params, &flat_grads, clip)?;
    let mut pos = 0;
    net.read_flat(&flat_params, &mut pos);
    Ok(())
}

/// Everything the learner tracks while episodes stream in.
struct Learner {
    bundle: PolicyBundle,
    cross: PolicyUpdater<Vec<HighStep>>,
    instance: PolicyUpdater<Vec<HighStep>>,
    low: PolicyUpdater<Vec<Vec<LowStep>>>,
    loss_params: LossParams,
    clip: f64,
    learned: bool,
    best: Option<(f64, SyntheticSet, usize)>,
    history: Vec<IterationRecord>,
    updates: UpdateCounts,
    failed: usize,
    incidents: Vec<String>,
}

impl Learner {
    fn new(bundle: PolicyBundle, cfg: &SearchConfig, learned: bool) -> Learner {
        let cross_params = bundle.cross.param_count();
        let instance_params = bundle.instance.param_count();
        let low_params = bundle.low.param_count();
        Learner {
            bundle,
            cross: PolicyUpdater::new(cross_params, cfg.learning_rate, cfg.buffer_cross),
            instance: PolicyUpdater::new(instance_params, cfg.learning_rate, cfg.buffer_instance),
            low: PolicyUpdater::new(low_params, cfg.learning_rate, cfg.buffer_low),
            loss_params: LossParams::from(cfg),
            clip: cfg.grad_clip,
            learned,
            best: None,
            history: Vec::new(),
            updates: UpdateCounts::default(),
            failed: 0,
            incidents: Vec::new(),
        }
    }

    fn record_failure(&mut self, iteration: usize, message: &str) {
        self.failed += 1;
        self.incidents
            .push(format!("iteration {iteration}: {message}"));
    }

    fn absorb(&mut self, iteration: usize, episode: Episode) {
        let Episode {
            cross,
            instance,
            low,
            synthetic,
            reward,
            ..
        } = episode;
        let synthetic_count = synthetic.len();
        if self.best.as_ref().map_or(true, |(b, _, _)| reward > *b) {
            self.best = Some((reward, synthetic, iteration));
        }
        self.history.push(IterationRecord {
            iteration,
            reward,
            synthetic_count,
            best_so_far: self.best.as_ref().expect("just set").0,
        });
        if !self.learned {
            return;
        }
        self.cross.buffer.push(cross.len(), cross);
        self.instance.buffer.push(instance.len(), instance);
        let low_steps: usize = low.iter().map(Vec::len).sum();
        self.low.buffer.push(low_steps, low);
        self.drain_updates();
    }

    fn drain_updates(&mut self) {
        while self.cross.buffer.steps >= self.cross.threshold {
            match update_high(
                &mut self.bundle.cross,
                &mut self.cross,
                &self.loss_params,
                self.clip,
            ) {
                Ok(()) => self.updates.cross += 1,
                Err(msg) => {
                    self.updates.skipped += 1;
                    self.incidents.push(format!("cross update skipped: {msg}"));
                }
            }
        }
        while self.instance.buffer.steps >= self.instance.threshold {
            match update_high(
                &mut self.bundle.instance,
                &mut self.instance,
                &self.loss_params,
                self.clip,
            ) {
                Ok(()) => self.updates.instance += 1,
                Err(msg) => {
                    self.updates.skipped += 1;
                    self.incidents
                        .push(format!("instance update skipped: {msg}"));
                }
            }
        }
        while self.low.buffer.steps >= self.low.threshold {
            match update_low(
                &mut self.bundle.low,
                &mut self.low,
                &self.loss_params,
                self.clip,
            ) {
                Ok(()) => self.updates.low += 1,
                Err(msg) => {
                    self.updates.skipped += 1;
                    self.incidents.push(format!("low update skipped: {msg}"));
                }
            }
        }
    }

    fn finish(mut self, cfg: &SearchConfig, seed: u64) -> Result<SearchResult> {
        let (best_validation, best_synthetic, best_iteration) =
            self.best.take().ok_or_else(|| {
                Error::runtime(format!(
                    "no iteration produced a score ({} failed); first failure: {}",
                    self.failed,
                    self.incidents
                        .first()
                        .map(String::as_str)
                        .unwrap_or("none recorded")
                ))
            })?;
        self.history.sort_by_key(|r| r.iteration);
        // Recompute the running best in iteration order: with parallel
        // actors, arrival order can differ from iteration order.
        let mut running = f64::NEG_INFINITY;
        for record in &mut self.history {
            running = running.max(record.reward);
            record.best_so_far = running;
        }
        Ok(SearchResult {
            best_synthetic,
            best_validation,
            best_iteration,
            history: self.history,
            updates: self.updates,
            failed_iterations: self.failed,
            incidents: self.incidents,
            bundle: self.bundle,
            config: cfg.clone(),
            seed,
        })
    }
}

fn roll_and_score(
    bundle: &PolicyBundle,
    split: &SplitDataset,
    neighbors: &NeighborIndex,
    spec: &ClassifierSpec,
    metric: Metric,
    cfg: &SearchConfig,
    mode: GenerateMode,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Episode> {
    let mut episode = generate(
        bundle,
        &split.train,
        neighbors,
        cfg.g1_max,
        cfg.g2_max,
        mode,
        rng,
    )?;
    let reward = reward_episode(&episode.synthetic, split, spec, metric)?;
    episode.set_reward(reward)?;
    Ok(episode)
}

fn search_loop(
    split: &SplitDataset,
    spec: &ClassifierSpec,
    metric: Metric,
    cfg: &SearchConfig,
    seed: u64,
    mode: GenerateMode,
    learned: bool,
) -> Result<SearchResult> {
    cfg.validate()?;
    spec.validate()?;
    let neighbors = NeighborIndex::build(&split.train, cfg.k)?;
    let seeds = SeedTree::new(seed);
    let bundle = PolicyBundle::new(
        split.train.dim() + USAGE_BINS,
        cfg.g1_max + 1,
        cfg.g2_max + 1,
        cfg.scorer_hidden,
        &mut seeds.stream("policy-init"),
    );
    let mut learner = Learner::new(bundle, cfg, learned);

    if cfg.actors == 1 {
        for iteration in 0..cfg.iterations {
            let mut rng = seeds.stream_indexed("episode", iteration as u64);
            match roll_and_score(
                &learner.bundle,
                split,
                &neighbors,
                spec,
                metric,
                cfg,
                mode,
                &mut rng,
            ) {
                Ok(episode) => learner.absorb(iteration, episode),
                Err(e) => learner.record_failure(iteration, &e.to_string()),
            }
        }
        return learner.finish(cfg, seed);
    }

    run_with_actors(split, spec, metric, cfg, &seeds, mode, &neighbors, &mut learner)?;
    learner.finish(cfg, seed)
}

enum ActorMessage {
    Done { iteration: usize, episode: Box<Episode> },
    Failed { iteration: usize, message: String },
}

struct WorkItem {
    iteration: usize,
    snapshot: Arc<PolicyBundle>,
    rng: rand_chacha::ChaCha8Rng,
}

/// Actor pool: workers pull dispatched episodes, roll them out against the
/// snapshot they were dispatched with, score them, and send them back.
/// The learner applies updates between dispatches, so later episodes see
/// fresher parameters.
#[allow(clippy::too_many_arguments)]
fn run_with_actors(
    split: &SplitDataset,
    spec: &ClassifierSpec,
    metric: Metric,
    cfg: &SearchConfig,
    seeds: &SeedTree,
    mode: GenerateMode,
    neighbors: &NeighborIndex,
    learner: &mut Learner,
) -> Result<()> {
    let (work_tx, work_rx) = mpsc::channel::<WorkItem>();
    let work_rx = Arc::new(Mutex::new(work_rx));
    let (done_tx, done_rx) = mpsc::channel::<ActorMessage>();

    thread::scope(|scope| -> Result<()> {
        for _ in 0..cfg.actors {
            let work_rx = Arc::clone(&work_rx);
            let done_tx = done_tx.clone();
            scope.spawn(move || loop {
                let item = {
                    let guard = work_rx.lock().expect("work queue lock");
                    guard.recv()
                };
                let Ok(WorkItem {
                    iteration,
                    snapshot,
                    mut rng,
                }) = item
                else {
                    break;
                };
                let message = match roll_and_score(
                    &snapshot, split, neighbors, spec, metric, cfg, mode, &mut rng,
                ) {
                    Ok(episode) => ActorMessage::Done {
                        iteration,
                        episode: Box::new(episode),
                    },
                    Err(e) => ActorMessage::Failed {
                        iteration,
                        message: e.to_string(),
                    },
                };
                if done_tx.send(message).is_err() {
                    break;
                }
            });
        }
        drop(done_tx);

        let mut dispatched = 0;
        let dispatch = |learner: &Learner, dispatched: &mut usize| {
            if *dispatched < cfg.iterations {
                let item = WorkItem {
                    iteration: *dispatched,
                    snapshot: Arc::new(learner.bundle.clone()),
                    rng: seeds.stream_indexed("episode", *dispatched as u64),
                };
                // Send can only fail if every actor is gone; the receive
                // loop below will surface that as an error.
                let _ = work_tx.send(item);
                *dispatched += 1;
            }
        };
        for _ in 0..cfg.actors.min(cfg.iterations) {
            dispatch(learner, &mut dispatched);
        }

        let mut completed = 0;
        while completed < cfg.iterations {
            let message = done_rx.recv().map_err(|_| {
                Error::runtime("all episode workers exited before the search finished")
            })?;
            completed += 1;
            match message {
                ActorMessage::Done { iteration, episode } => learner.absorb(iteration, *episode),
                ActorMessage::Failed { iteration, message } => {
                    learner.record_failure(iteration, &message)
                }
            }
            dispatch(learner, &mut dispatched);
        }
        drop(work_tx);
        Ok(())
    })
}

/// Learned search: episodes sampled from the policies, policies updated
/// from buffered trajectories.
pub fn train_search(
    split: &SplitDataset,
    spec: &ClassifierSpec,
    metric: Metric,
    cfg: &SearchConfig,
    seed: u64,
) -> Result<SearchResult> {
    search_loop(split, spec, metric, cfg, seed, GenerateMode::Sample, true)
}

/// Ablation baseline: the same loop and decision space, but every action
/// is drawn uniformly and nothing is learned.
pub fn random_search(
    split: &SplitDataset,
    spec: &ClassifierSpec,
    metric: Metric,
    cfg: &SearchConfig,
    seed: u64,
) -> Result<SearchResult> {
    search_loop(split, spec, metric, cfg, seed, GenerateMode::Uniform, false)
}
