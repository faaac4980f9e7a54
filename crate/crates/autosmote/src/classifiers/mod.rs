//! Deterministic downstream classifiers used to score resampling
//! strategies: k-nearest-neighbors, a Gini decision tree, boosted decision
//! stumps, and a linear SVM trained by stochastic subgradient descent.
//!
//! Every learner is a pure function of its spec and the training data; for
//! equal inputs, `fit` and `predict` reproduce bit-identical results. All
//! tie-breaks are fixed (lower index, lower feature, then the majority
//! class 0) so no behavior depends on iteration order or hash state.

mod adaboost;
mod knn;
mod svm;
mod tree;

pub use adaboost::AdaBoostModel;
pub use knn::KnnModel;
pub use svm::SvmModel;
pub use tree::TreeModel;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{score, Metric};

fn default_k() -> usize {
    5
}
fn default_max_depth() -> usize {
    10
}
fn default_min_samples_split() -> usize {
    2
}
fn default_rounds() -> usize {
    50
}
fn default_epochs() -> usize {
    100
}
fn default_lambda() -> f64 {
    1e-4
}

/// Which classifier to train, with its hyperparameters.
///
/// Serialized with a `kind` tag so configs read as
/// `{ kind = "knn", k = 5 }`; omitted fields take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassifierSpec {
    /// Euclidean k-nearest-neighbors vote (default k = 5).
    Knn {
        #[serde(default = "default_k")]
        k: usize,
    },
    /// CART-style tree minimizing Gini impurity with midpoint thresholds
    /// (defaults: max_depth = 10, min_samples_split = 2).
    DecisionTree {
        #[serde(default = "default_max_depth")]
        max_depth: usize,
        #[serde(default = "default_min_samples_split")]
        min_samples_split: usize,
    },
    /// Boosted depth-1 stumps; boosting halts early when a round's weighted
    /// error reaches 0.5 (default rounds = 50).
    Adaboost {
        #[serde(default = "default_rounds")]
        rounds: usize,
    },
    /// Hinge-loss linear classifier with L2 regularization, trained by
    /// stochastic subgradient descent over a fixed per-seed permutation
    /// (defaults: epochs = 100, lambda = 1e-4, seed = 0).
    LinearSvm {
        #[serde(default = "default_epochs")]
        epochs: usize,
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default)]
        seed: u64,
    },
}

impl ClassifierSpec {
    pub fn knn(k: usize) -> Self {
        ClassifierSpec::Knn { k }
    }

    pub fn decision_tree() -> Self {
        ClassifierSpec::DecisionTree {
            max_depth: default_max_depth(),
            min_samples_split: default_min_samples_split(),
        }
    }

    pub fn adaboost() -> Self {
        ClassifierSpec::Adaboost {
            rounds: default_rounds(),
        }
    }

    pub fn linear_svm() -> Self {
        ClassifierSpec::LinearSvm {
            epochs: default_epochs(),
            lambda: default_lambda(),
            seed: 0,
        }
    }

    /// Short stable name, used in reports and file names.
    pub fn kind_name(&self) -> &'static str {
        match self {
            ClassifierSpec::Knn { .. } => "knn",
            ClassifierSpec::DecisionTree { .. } => "decision_tree",
            ClassifierSpec::Adaboost { .. } => "adaboost",
            ClassifierSpec::LinearSvm { .. } => "linear_svm",
        }
    }

    /// Check hyperparameter ranges before training.
    pub fn validate(&self) -> Result<()> {
        match self {
            ClassifierSpec::Knn { k } if *k == 0 => {
                Err(Error::config("knn requires k >= 1"))
            }
            ClassifierSpec::DecisionTree { max_depth, .. } if *max_depth == 0 => {
                Err(Error::config("decision_tree requires max_depth >= 1"))
            }
            ClassifierSpec::DecisionTree {
                min_samples_split, ..
            } if *min_samples_split < 2 => {
                Err(Error::config("decision_tree requires min_samples_split >= 2"))
            }
            ClassifierSpec::Adaboost { rounds } if *rounds == 0 => {
                Err(Error::config("adaboost requires rounds >= 1"))
            }
            ClassifierSpec::LinearSvm { epochs, .. } if *epochs == 0 => {
                Err(Error::config("linear_svm requires epochs >= 1"))
            }
            ClassifierSpec::LinearSvm { lambda, .. }
                if !(lambda.is_finite() && *lambda > 0.0) =>
            {
                Err(Error::config("linear_svm requires lambda > 0"))
            }
            _ => Ok(()),
        }
    }
}

/// A fitted classifier ready for prediction.
#[derive(Debug, Clone)]
pub enum TrainedClassifier {
    Knn(KnnModel),
    Tree(TreeModel),
    Adaboost(AdaBoostModel),
    Svm(SvmModel),
}

impl TrainedClassifier {
    /// Feature width the model was trained on.
    pub fn dim(&self) -> usize {
        match self {
            TrainedClassifier::Knn(m) => m.dim(),
            TrainedClassifier::Tree(m) => m.dim(),
            TrainedClassifier::Adaboost(m) => m.dim(),
            TrainedClassifier::Svm(m) => m.dim(),
        }
    }

    /// Predict a label (0 or 1) per row.
    pub fn predict(&self, features: ArrayView2<'_, f64>) -> Result<Vec<u8>> {
        if features.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: features.ncols(),
            });
        }
        Ok(match self {
            TrainedClassifier::Knn(m) => m.predict(features),
            TrainedClassifier::Tree(m) => m.predict(features),
            TrainedClassifier::Adaboost(m) => m.predict(features),
            TrainedClassifier::Svm(m) => m.predict(features),
        })
    }
}

fn check_train_data(train: &Dataset) -> Result<()> {
    if train.n_rows() == 0 {
        return Err(Error::data("cannot train on an empty dataset"));
    }
    if train.n_majority() == 0 || train.n_minority() == 0 {
        return Err(Error::data(
            "training data must contain both classes",
        ));
    }
    Ok(())
}

/// Train the classifier described by `spec` on `train`.
pub fn fit(spec: &ClassifierSpec, train: &Dataset) -> Result<TrainedClassifier> {
    spec.validate()?;
    check_train_data(train)?;
    Ok(match spec {
        ClassifierSpec::Knn { k } => TrainedClassifier::Knn(knn::fit(train, *k)),
        ClassifierSpec::DecisionTree {
            max_depth,
            min_samples_split,
        } => TrainedClassifier::Tree(tree::fit(train, *max_depth, *min_samples_split)),
        ClassifierSpec::Adaboost { rounds } => {
            TrainedClassifier::Adaboost(adaboost::fit(train, *rounds))
        }
        ClassifierSpec::LinearSvm {
            epochs,
            lambda,
            seed,
        } => TrainedClassifier::Svm(svm::fit(train, *epochs, *lambda, *seed)),
    })
}

/// Score a fitted model on an evaluation set.
pub fn evaluate(model: &TrainedClassifier, eval: &Dataset, metric: Metric) -> Result<f64> {
    let preds = model.predict(eval.features())?;
    score(metric, eval.labels(), &preds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    /// Two well-separated clusters: class 0 near the origin, class 1 near
    /// (10, 10). Any of the four learners should fit this exactly.
    fn separated(n_per_class: usize) -> Dataset {
        let n = 2 * n_per_class;
        let features = Array2::from_shape_fn((n, 2), |(r, c)| {
            let base = if r < n_per_class { 0.0 } else { 10.0 };
            // small deterministic jitter
            base + ((r * 3 + c * 7) % 5) as f64 * 0.1
        });
        let labels = (0..n).map(|i| u8::from(i >= n_per_class)).collect();
        Dataset::from_parts(features, labels).unwrap()
    }

    #[test]
    fn test_all_kinds_fit_separated_data_exactly() {
        let ds = separated(20);
        for spec in [
            ClassifierSpec::knn(5),
            ClassifierSpec::decision_tree(),
            ClassifierSpec::adaboost(),
            ClassifierSpec::linear_svm(),
        ] {
            let model = fit(&spec, &ds).unwrap();
            let acc = evaluate(&model, &ds, Metric::MacroF1).unwrap();
            assert_eq!(acc, 1.0, "{} failed on separable data", spec.kind_name());
        }
    }

    #[test]
    fn test_fit_is_deterministic() {
        let ds = separated(15);
        for spec in [
            ClassifierSpec::knn(3),
            ClassifierSpec::decision_tree(),
            ClassifierSpec::adaboost(),
            ClassifierSpec::linear_svm(),
        ] {
            let a = fit(&spec, &ds).unwrap().predict(ds.features()).unwrap();
            let b = fit(&spec, &ds).unwrap().predict(ds.features()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn test_single_class_training_rejected() {
        let features = Array2::zeros((4, 2));
        let ds = Dataset::from_parts(features, vec![0, 0, 0, 0]).unwrap();
        assert!(fit(&ClassifierSpec::knn(1), &ds).is_err());
    }

    #[test]
    fn test_dimension_mismatch_rejected() {
        let ds = separated(5);
        let model = fit(&ClassifierSpec::knn(1), &ds).unwrap();
        let wrong = Array2::zeros((2, 3));
        assert!(model.predict(wrong.view()).is_err());
    }

    #[test]
    fn test_spec_validation() {
        assert!(ClassifierSpec::Knn { k: 0 }.validate().is_err());
        assert!(ClassifierSpec::DecisionTree {
            max_depth: 0,
            min_samples_split: 2
        }
        .validate()
        .is_err());
        assert!(ClassifierSpec::DecisionTree {
            max_depth: 3,
            min_samples_split: 1
        }
        .validate()
        .is_err());
        assert!(ClassifierSpec::Adaboost { rounds: 0 }.validate().is_err());
        assert!(ClassifierSpec::LinearSvm {
            epochs: 100,
            lambda: 0.0,
            seed: 0
        }
        .validate()
        .is_err());
        assert!(ClassifierSpec::knn(5).validate().is_ok());
    }

    #[test]
    fn test_spec_serde_round_trip_with_defaults() {
        let spec: ClassifierSpec = toml::from_str("kind = \"knn\"").unwrap();
        assert_eq!(spec, ClassifierSpec::knn(5));
        let spec: ClassifierSpec =
            toml::from_str("kind = \"decision_tree\"\nmax_depth = 4").unwrap();
        assert_eq!(
            spec,
            ClassifierSpec::DecisionTree {
                max_depth: 4,
                min_samples_split: 2
            }
        );
        let spec: ClassifierSpec = serde_json::from_str(r#"{"kind": "linear_svm"}"#).unwrap();
        assert_eq!(spec, ClassifierSpec::linear_svm());
        // Unknown keys are rejected.
        assert!(toml::from_str::<ClassifierSpec>("kind = \"knn\"\nbogus = 1").is_err());
    }
}
