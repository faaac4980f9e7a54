//! Versioned parameter snapshots: named tensors with explicit shapes and
//! flat `f64` payloads, serialized as JSON.
//!
//! The format is deliberately dumb — no architecture description beyond
//! shapes — so loaders must know what model they expect and verify shapes
//! against it. [`Checkpoint::from_slice`] accepts untrusted bytes and
//! rejects anything malformed without panicking.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

/// One named parameter block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    /// Dimensions; the product must equal `data.len()`.
    pub shape: Vec<usize>,
    /// Row-major flattened values.
    pub data: Vec<f64>,
}

/// An ordered collection of named tensors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub tensors: Vec<TensorEntry>,
}

impl Checkpoint {
    pub fn new() -> Checkpoint {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            tensors: Vec::new(),
        }
    }

    /// Append a tensor. Panics if the shape does not cover the data; that
    /// is a caller bug, not an input error.
    pub fn push(&mut self, name: &str, shape: Vec<usize>, data: Vec<f64>) {
        let expect: usize = shape.iter().product();
        assert_eq!(
            expect,
            data.len(),
            "tensor {name}: shape covers {expect} values, data holds {}",
            data.len()
        );
        self.tensors.push(TensorEntry {
            name: name.to_string(),
            shape,
            data,
        });
    }

    /// Look up a tensor by name.
    pub fn find(&self, name: &str) -> Option<&TensorEntry> {
        self.tensors.iter().find(|t| t.name == name)
    }

    /// Look up a tensor by name and check its shape.
    pub fn tensor(&self, name: &str, shape: &[usize]) -> Result<&TensorEntry> {
        let entry = self
            .find(name)
            .ok_or_else(|| Error::runtime(format!("checkpoint is missing tensor {name:?}")))?;
        if entry.shape != shape {
            return Err(Error::runtime(format!(
                "checkpoint tensor {name:?} has shape {:?}, expected {shape:?}",
                entry.shape
            )));
        }
        Ok(entry)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        let bytes = std::fs::read(path)?;
        Checkpoint::from_slice(&bytes)
    }

    /// Parse and validate checkpoint bytes.
    pub fn from_slice(bytes: &[u8]) -> Result<Checkpoint> {
        let ckpt: Checkpoint = serde_json::from_slice(bytes)?;
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::runtime(format!(
                "unsupported checkpoint version {} (expected {CHECKPOINT_VERSION})",
                ckpt.version
            )));
        }
        for entry in &ckpt.tensors {
            let expect: usize = entry.shape.iter().product();
            if expect != entry.data.len() {
                return Err(Error::runtime(format!(
                    "checkpoint tensor {:?}: shape {:?} covers {expect} values, data holds {}",
                    entry.name,
                    entry.shape,
                    entry.data.len()
                )));
            }
            if entry.data.iter().any(|v| !v.is_finite()) {
                return Err(Error::runtime(format!(
                    "checkpoint tensor {:?} contains non-finite values",
                    entry.name
                )));
            }
        }
        Ok(ckpt)
    }
}

impl Default for Checkpoint {
    fn default() -> Self {
        Checkpoint::new()
    }
}
