//! Minimal feed-forward neural network layer: linear layers, ReLU MLPs
//! with cached activations for exact backpropagation, categorical helpers,
//! and an Adam optimizer with global gradient-norm clipping.
//!
//! Everything runs in f64 with plain sequential loops, so identical inputs
//! produce bit-identical outputs on every platform.

mod adam;
mod checkpoint;
mod linear;
mod mlp;
mod ops;

pub use adam::{Adam, StepReport};
pub use checkpoint::{Checkpoint, TensorEntry, CHECKPOINT_VERSION};
pub use linear::{Linear, LinearGrads};
pub use mlp::{Mlp, MlpCache, MlpGrads};
pub use ops::{argmax, entropy, sample_categorical, softmax};
