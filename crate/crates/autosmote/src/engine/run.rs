//! The experiment pipeline: load data, impose the target imbalance, split,
//! preprocess, run the configured method once per seed, and write a report.
//!
//! Protocol hygiene is enforced structurally: every method selects its
//! strategy using the train and validation parts only, and the test part
//! lives behind an audited gate that counts evaluations — a clean run reads
//! exactly one per seed, and the count is recorded in the report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::classifiers::{evaluate, fit, TrainedClassifier};
use crate::data::{
    preprocess_split, stratified_partition, subsample_minority_raw, Dataset, RawTable,
    SplitDataset,
};
use crate::error::Result;
use crate::metrics::Metric;
use crate::rng::SeedTree;
use crate::samplers::{export_provenance_csv, grid_search_ratio, ResamplerKind, SyntheticSet};
use crate::search::{random_search, save_checkpoint, train_search, SearchConfig, SearchResult};

use super::config::{ExperimentConfig, Method};
use super::report::{
    mean, median, ChosenStrategy, DatasetSummary, EnvironmentFingerprint, RunReport, ScoreSummary,
    SeedOutcome,
};

/// Counted gate in front of the test partition.
pub struct TestAudit<'a> {
    test: &'a Dataset,
    evaluations: usize,
}

impl<'a> TestAudit<'a> {
    pub fn new(test: &'a Dataset) -> TestAudit<'a> {
        TestAudit {
            test,
            evaluations: 0,
        }
    }

    pub fn evaluate(&mut self, model: &TrainedClassifier, metric: Metric) -> Result<f64> {
        self.evaluations += 1;
        evaluate(model, self.test, metric)
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }
}

/// What a method hands back after selecting its strategy on validation.
struct MethodOutcome {
    model: TrainedClassifier,
    validation_score: f64,
    chosen: ChosenStrategy,
    incidents: Vec<String>,
    history: Option<Vec<crate::search::IterationRecord>>,
    /// Synthetic set worth exporting, if the method produced one.
    synthetic: Option<SyntheticSet>,
    /// Search result worth checkpointing (the learned method only).
    checkpoint: Option<SearchResult>,
}

fn search_config_for(config: &ExperimentConfig, train: &Dataset) -> Result<SearchConfig> {
    let mut search = SearchConfig::defaults_for(train);
    if let Some(overrides) = &config.search {
        overrides.apply(&mut search);
    }
    search.actors = config.effective_actors();
    search.validate()?;
    Ok(search)
}

fn run_method(config: &ExperimentConfig, split: &SplitDataset, seed: u64) -> Result<MethodOutcome> {
    match config.method {
        Method::NoResampling => {
            let model = fit(&config.classifier, &split.train)?;
            let validation_score = evaluate(&model, &split.validation, config.metric)?;
            Ok(MethodOutcome {
                model,
                validation_score,
                chosen: ChosenStrategy::default(),
                incidents: Vec::new(),
                history: None,
                synthetic: None,
                checkpoint: None,
            })
        }
        Method::Smote | Method::RandomOver | Method::RandomUnder => {
            let kind = match config.method {
                Method::Smote => ResamplerKind::Smote { k: config.smote_k },
                Method::RandomOver => ResamplerKind::RandomOversample,
                _ => ResamplerKind::RandomUndersample,
            };
            let outcome = grid_search_ratio(
                kind,
                &split.train,
                &split.validation,
                &config.classifier,
                config.metric,
                &config.ratio_grid,
                &SeedTree::new(seed),
            )?;
            let added = outcome.best_train.n_rows().saturating_sub(split.train.n_rows());
            let model = fit(&config.classifier, &outcome.best_train)?;
            Ok(MethodOutcome {
                model,
                validation_score: outcome.best_validation,
                chosen: ChosenStrategy {
                    ratio: Some(outcome.best_ratio),
                    grid_fits: Some(outcome.fits),
                    best_iteration: None,
                    added_rows: added,
                },
                incidents: Vec::new(),
                history: None,
                synthetic: outcome.best_synthetic,
                checkpoint: None,
            })
        }
        Method::Autosmote | Method::RandomSearch => {
            let search = search_config_for(config, &split.train)?;
            let result = if config.method == Method::Autosmote {
                train_search(split, &config.classifier, config.metric, &search, seed)?
            } else {
                random_search(split, &config.classifier, config.metric, &search, seed)?
            };
            let augmented = result.best_synthetic.augment(&split.train)?;
            let model = fit(&config.classifier, &augmented)?;
            Ok(MethodOutcome {
                model,
                validation_score: result.best_validation,
                chosen: ChosenStrategy {
                    ratio: None,
                    grid_fits: None,
                    best_iteration: Some(result.best_iteration),
                    added_rows: result.best_synthetic.len(),
                },
                incidents: result.incidents.clone(),
                history: Some(result.history.clone()),
                synthetic: Some(result.best_synthetic.clone()),
                checkpoint: (config.method == Method::Autosmote).then_some(result),
            })
        }
    }
}

struct SeedRun {
    outcome: SeedOutcome,
    artifacts: Vec<PathBuf>,
}

fn run_seed(
    config: &ExperimentConfig,
    raw: &RawTable,
    seed: u64,
    out_dir: &Path,
    stem: &str,
) -> Result<SeedRun> {
    let start = Instant::now();
    let seeds = SeedTree::new(seed);

    let working = match config.target_ir {
        Some(ir) => subsample_minority_raw(raw, ir, &mut seeds.stream("subsample"))?,
        None => raw.clone(),
    };
    let partition = stratified_partition(
        &working.labels,
        config.split.as_tuple(),
        &mut seeds.stream("split"),
    )?;
    let (split, _spec, _stats) = preprocess_split(&working, &partition)?;

    let method = run_method(config, &split, seed)?;
    let mut audit = TestAudit::new(&split.test);
    let test_score = audit.evaluate(&method.model, config.metric)?;

    let mut artifacts = Vec::new();
    if let Some(synthetic) = &method.synthetic {
        if !synthetic.is_empty() {
            let path = out_dir.join(format!("{stem}-seed{seed}-provenance.csv"));
            export_provenance_csv(synthetic, &path)?;
            artifacts.push(path);
        }
    }
    if let Some(result) = &method.checkpoint {
        let path = out_dir.join(format!("{stem}-seed{seed}-policy.json"));
        save_checkpoint(&result.bundle, &path)?;
        artifacts.push(path);
    }

    Ok(SeedRun {
        outcome: SeedOutcome {
            seed,
            validation_score: method.validation_score,
            test_score,
            test_evaluations: audit.evaluations(),
            wall_clock_seconds: start.elapsed().as_secs_f64(),
            chosen: method.chosen,
            incidents: method.incidents,
            history: method.history,
        },
        artifacts,
    })
}

/// A finished run: the report, where it was written, and the per-seed
/// artifact files next to it.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub report_path: PathBuf,
    pub artifacts: Vec<PathBuf>,
}

/// File-name stem shared by the report and its artifacts.
fn file_stem(config: &ExperimentConfig) -> String {
    let dataset = config
        .dataset
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    format!(
        "{dataset}-{}-{}-{}",
        config.method.name(),
        config.classifier.kind_name(),
        config.metric.name()
    )
}

/// Execute the configured experiment over all seeds and write the report.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let raw = crate::data::load_csv(
        &config.dataset,
        &config.label_column,
        config.schema_hints(),
    )?;

    let out_dir = config.resolved_output_dir();
    std::fs::create_dir_all(&out_dir)?;
    let stem = file_stem(config);

    // Summarize the working data once, from the first seed's subsample.
    let summary_raw = match config.target_ir {
        Some(ir) => subsample_minority_raw(
            &raw,
            ir,
            &mut SeedTree::new(config.seeds[0]).stream("subsample"),
        )?,
        None => raw.clone(),
    };
    let dataset_summary = DatasetSummary {
        rows: summary_raw.n_rows(),
        features: summary_raw.n_columns(),
        majority: summary_raw.n_majority(),
        minority: summary_raw.n_minority(),
        imbalance_ratio: summary_raw.n_majority() as f64 / summary_raw.n_minority() as f64,
    };

    let mut outcomes = Vec::with_capacity(config.seeds.len());
    let mut artifacts = Vec::new();
    for &seed in &config.seeds {
        let mut run = run_seed(config, &raw, seed, &out_dir, &stem)?;
        outcomes.push(run.outcome);
        artifacts.append(&mut run.artifacts);
    }

    let validation: Vec<f64> = outcomes.iter().map(|o| o.validation_score).collect();
    let test: Vec<f64> = outcomes.iter().map(|o| o.test_score).collect();
    let report = RunReport {
        version: super::report::REPORT_VERSION,
        method: config.method.name().to_string(),
        dataset: config.dataset.to_string_lossy().into_owned(),
        label_column: config.label_column.clone(),
        target_ir: config.target_ir,
        classifier: config.classifier.clone(),
        metric: config.metric,
        dataset_summary,
        seeds: outcomes,
        summary: ScoreSummary {
            mean_validation: mean(&validation),
            mean_test: mean(&test),
            median_test: median(&test),
        },
        environment: EnvironmentFingerprint::current(),
    };

    let report_path = out_dir.join(format!("{stem}-report.json"));
    report.save(&report_path)?;
    Ok(RunOutcome {
        report,
        report_path,
        artifacts,
    })
}
