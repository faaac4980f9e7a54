//! Validation-guided grid search over target class ratios for the plain
//! resamplers.

use crate::classifiers::{self, ClassifierSpec};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::rng::SeedTree;
use crate::samplers::{
    random_oversample, random_undersample, smote_with_index, NeighborIndex, SyntheticSet,
};

/// Which resampling family the grid search tunes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResamplerKind {
    /// Interpolation over-sampling with `k` candidate neighbors.
    Smote { k: usize },
    RandomOversample,
    RandomUndersample,
}

impl ResamplerKind {
    pub fn name(&self) -> &'static str {
        match self {
            ResamplerKind::Smote { .. } => "smote",
            ResamplerKind::RandomOversample => "random_oversample",
            ResamplerKind::RandomUndersample => "random_undersample",
        }
    }
}

/// Result of tuning the target ratio on the validation part.
#[derive(Debug, Clone)]
pub struct GridSearchOutcome {
    pub best_ratio: f64,
    pub best_validation: f64,
    /// Training set resampled at the winning ratio.
    pub best_train: Dataset,
    /// Synthetic samples behind `best_train` (interpolation sampler only).
    pub best_synthetic: Option<SyntheticSet>,
    /// `(ratio, validation score)` per evaluated grid point, ascending ratio.
    pub evaluations: Vec<(f64, f64)>,
    /// Grid points that were resampled, fitted, and scored.
    pub fits: usize,
    /// Grid points skipped because the sampler cannot reach them (the
    /// dataset already exceeds that ratio).
    pub skipped: usize,
}

/// Tune the target ratio of `kind` over `grid`, scoring each candidate by
/// training `spec` on the resampled set and evaluating on `validation`.
///
/// The grid is deduplicated and scanned in ascending order; score ties keep
/// the smaller ratio. Every grid point gets its own named random stream, so
/// the winning training set can be reproduced exactly from the same seeds.
/// When the whole grid is unreachable, the unmodified training set is
/// scored instead and reported with the current ratio.
pub fn grid_search_ratio(
    kind: ResamplerKind,
    train: &Dataset,
    validation: &Dataset,
    spec: &ClassifierSpec,
    metric: Metric,
    grid: &[f64],
    seeds: &SeedTree,
) -> Result<GridSearchOutcome> {
    if grid.is_empty() {
        return Err(Error::config("ratio grid must not be empty"));
    }
    for &r in grid {
        if !(r.is_finite() && r > 0.0 && r <= 1.0) {
            return Err(Error::config(format!(
                "ratio grid values must be in (0, 1], got {r}"
            )));
        }
    }
    if validation.n_rows() == 0 {
        return Err(Error::data("validation part is empty"));
    }
    let mut ratios: Vec<f64> = grid.to_vec();
    ratios.sort_by(f64::total_cmp);
    ratios.dedup();

    let index = match kind {
        ResamplerKind::Smote { k } => Some(NeighborIndex::build(train, k)?),
        _ => None,
    };
    let n_majority = train.n_majority();
    let n_minority = train.n_minority();

    let mut best: Option<(f64, f64, Dataset, Option<SyntheticSet>)> = None;
    let mut evaluations = Vec::new();
    let mut fits = 0;
    let mut skipped = 0;

    for (i, &ratio) in ratios.iter().enumerate() {
        let feasible = match kind {
            ResamplerKind::Smote { .. } | ResamplerKind::RandomOversample => {
                (ratio * n_majority as f64).round() as usize >= n_minority
            }
            ResamplerKind::RandomUndersample => {
                (n_minority as f64 / ratio).round() as usize <= n_majority
            }
        };
        if !feasible {
            skipped += 1;
            continue;
        }
        let mut rng = seeds.stream_indexed("grid-resample", i as u64);
        let (resampled, synthetic) = match (kind, &index) {
            (ResamplerKind::Smote { .. }, Some(index)) => {
                let target = (ratio * n_majority as f64).round() as usize;
                let set = smote_with_index(index, target - n_minority, &mut rng)?;
                (set.augment(train)?, Some(set))
            }
            (ResamplerKind::RandomOversample, _) => {
                (random_oversample(train, ratio, &mut rng)?, None)
            }
            (ResamplerKind::RandomUndersample, _) => {
                (random_undersample(train, ratio, &mut rng)?, None)
            }
            _ => unreachable!("index is built exactly for the smote kind"),
        };
        let model = classifiers::fit(spec, &resampled)?;
        let score = classifiers::evaluate(&model, validation, metric)?;
        fits += 1;
        evaluations.push((ratio, score));
        let improves = match &best {
            None => true,
            Some((_, best_score, _, _)) => score > *best_score,
        };
        if improves {
            best = Some((ratio, score, resampled, synthetic));
        }
    }

    // Unreachable grid: fall back to the training set as-is.
    let (best_ratio, best_validation, best_train, best_synthetic) = match best {
        Some(b) => b,
        None => {
            let model = classifiers::fit(spec, train)?;
            let score = classifiers::evaluate(&model, validation, metric)?;
            fits += 1;
            let current = n_minority as f64 / n_majority as f64;
            evaluations.push((current, score));
            (current, score, train.clone(), None)
        }
    };

    Ok(GridSearchOutcome {
        best_ratio,
        best_validation,
        best_train,
        best_synthetic,
        evaluations,
        fits,
        skipped,
    })
}
