//! Resamplers for imbalanced training sets: interpolation-based minority
//! synthesis with full provenance, plain random over/under-sampling, and a
//! validation-guided grid search over target class ratios.

mod grid;
mod neighbors;
mod random;
mod synth;

pub use grid::{grid_search_ratio, GridSearchOutcome, ResamplerKind};
pub use neighbors::NeighborIndex;
pub use random::{random_oversample, random_undersample};
pub use synth::{
    export_provenance_csv, interpolate, smote, smote_with_index, Provenance, SyntheticSet,
};
