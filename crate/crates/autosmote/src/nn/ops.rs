//! Categorical-distribution helpers shared by the policies.

use rand::Rng;

use crate::error::{Error, Result};

/// Numerically stable softmax: shifts by the maximum logit before
/// exponentiating, so large logits cannot overflow.
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>> {
    if logits.is_empty() {
        return Err(Error::Numerical("softmax over zero logits".to_string()));
    }
    if logits.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(
            "softmax over non-finite logits".to_string(),
        ));
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / sum).collect())
}

/// Shannon entropy `-sum p ln p` with the `0 ln 0 = 0` convention.
pub fn entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Draw an index proportional to `probs` using a single uniform variate.
pub fn sample_categorical(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return i;
        }
    }
    // Rounding can leave cum slightly under 1; fall back to the last index.
    probs.len() - 1
}

/// Index of the largest value; ties resolve to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
