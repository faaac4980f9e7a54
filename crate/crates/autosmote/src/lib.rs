//! Validation-guided automated over-sampling for binary imbalanced
//! classification.
//!
//! The library builds a SMOTE-shaped search space over synthetic minority
//! samples and optimizes it with a three-level actor-critic agent whose
//! reward is the validation score of a base classifier trained on the
//! augmented data. Classic resamplers (random over/under-sampling, SMOTE)
//! with validation-guided ratio grids are included as baselines.
//!
//! Top-level layout:
//!
//! * [`data`] — CSV ingestion, preprocessing, artificial imbalance,
//!   train/validation/test splitting.
//! * [`metrics`] — Macro-F1 and MCC, used both as reward and for reporting.
//! * [`classifiers`] — self-contained KNN / CART / AdaBoost / linear-SVM
//!   implementations behind one train/predict interface.
//! * [`samplers`] — baseline resamplers plus the shared k-NN and
//!   interpolation machinery.
//! * [`nn`] — minimal MLP with manual reverse-mode gradients and Adam.
//! * [`search`] — the hierarchical generation MDP, V-trace targets,
//!   actor-critic loss, and the buffered training loop.
//! * [`engine`] — experiment orchestration, configuration, and reports.

pub mod classifiers;
pub mod data;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod nn;
pub mod rng;
pub mod samplers;
pub mod search;

pub use error::{Error, Result};
