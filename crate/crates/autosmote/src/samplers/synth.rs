//! Interpolation-based minority synthesis with per-sample provenance.

use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::samplers::NeighborIndex;

/// Where one synthetic sample came from: dataset rows of the source and
/// neighbor minority instances, and the interpolation coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub source_row: usize,
    pub neighbor_row: usize,
    pub lambda: f64,
}

/// A batch of synthetic minority samples plus how each one was built.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSet {
    samples: Array2<f64>,
    provenance: Vec<Provenance>,
}

impl SyntheticSet {
    pub fn new(samples: Array2<f64>, provenance: Vec<Provenance>) -> Result<Self> {
        if samples.nrows() != provenance.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.nrows(),
                got: provenance.len(),
            });
        }
        Ok(SyntheticSet {
            samples,
            provenance,
        })
    }

    pub fn empty(dim: usize) -> Self {
        SyntheticSet {
            samples: Array2::zeros((0, dim)),
            provenance: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }

    pub fn samples(&self) -> &Array2<f64> {
        &self.samples
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// Training set extended with these samples as synthetic minority rows.
    pub fn augment(&self, train: &Dataset) -> Result<Dataset> {
        train.append_minority_rows(self.samples.view())
    }
}

/// Linear interpolation `source + lambda * (neighbor - source)`.
pub fn interpolate(
    source: ArrayView1<'_, f64>,
    neighbor: ArrayView1<'_, f64>,
    lambda: f64,
) -> Result<Array1<f64>> {
    if source.len() != neighbor.len() {
        return Err(Error::DimensionMismatch {
            expected: source.len(),
            got: neighbor.len(),
        });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::config(format!(
            "interpolation coefficient must be in [0, 1], got {lambda}"
        )));
    }
    Ok(source
        .iter()
        .zip(neighbor.iter())
        .map(|(&s, &n)| s + lambda * (n - s))
        .collect())
}

/// Classic interpolation over-sampling: draw a uniform source instance, a
/// uniform neighbor from its list, and a uniform coefficient in [0, 1).
pub fn smote_with_index(
    index: &NeighborIndex,
    n_new: usize,
    rng: &mut impl Rng,
) -> Result<SyntheticSet> {
    let dim = index.minority_features().ncols();
    if n_new == 0 {
        return Ok(SyntheticSet::empty(dim));
    }
    let mut samples = Array2::zeros((n_new, dim));
    let mut provenance = Vec::with_capacity(n_new);
    for s in 0..n_new {
        let source = rng.gen_range(0..index.n_instances());
        let list = index.neighbors_of(source);
        let neighbor = list[rng.gen_range(0..list.len())] as usize;
        let lambda: f64 = rng.gen();
        let sample = interpolate(
            index.features_of(source),
            index.features_of(neighbor),
            lambda,
        )?;
        samples.row_mut(s).assign(&sample);
        provenance.push(Provenance {
            source_row: index.row_of(source),
            neighbor_row: index.row_of(neighbor),
            lambda,
        });
    }
    SyntheticSet::new(samples, provenance)
}

/// Build the neighbor index at `k` and synthesize `n_new` samples.
pub fn smote(
    train: &Dataset,
    n_new: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Result<SyntheticSet> {
    let index = NeighborIndex::build(train, k)?;
    smote_with_index(&index, n_new, rng)
}

/// Write provenance as CSV: one line per sample with its source row,
/// neighbor row, and coefficient.
pub fn export_provenance_csv(set: &SyntheticSet, path: impl AsRef<Path>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "sample,source_row,neighbor_row,lambda")?;
    for (i, p) in set.provenance().iter().enumerate() {
        writeln!(out, "{i},{},{},{}", p.source_row, p.neighbor_row, p.lambda)?;
    }
    out.flush()?;
    Ok(())
}
