//! Dense embedding vectors and the element-wise difference representation.

use std::ops::Deref;

use crate::error::{Error, Result};

fn check_finite(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptyVector);
    }
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFiniteInput { index }),
        None => Ok(()),
    }
}

fn check_dims(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// A sentence embedding. Non-empty, every component finite.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(Self(values))
    }

    /// Widens single-precision storage; accumulation always happens in f64.
    pub fn from_f32(values: &[f32]) -> Result<Self> {
        Self::new(values.iter().map(|&v| f64::from(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for EmbeddingVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Component-wise absolute difference between an evidence and a claim
/// embedding. Every component is finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffVector(Vec<f64>);

impl DiffVector {
    /// Wraps precomputed difference values, rejecting negative or non-finite
    /// components.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        if let Some(index) = values.iter().position(|&v| v < 0.0) {
            return Err(Error::InvariantViolation(format!(
                "difference component {index} is negative"
            )));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for DiffVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `|evidence - claim|`, component by component.
pub fn diff_vector(claim: &EmbeddingVector, evidence: &EmbeddingVector) -> Result<DiffVector> {
    check_dims(claim.dim(), evidence.dim())?;
    let values = claim
        .iter()
        .zip(evidence.iter())
        .map(|(c, e)| (e - c).abs())
        .collect::<Vec<_>>();
    // Differences of finite values can still overflow to infinity.
    check_finite(&values)?;
    Ok(DiffVector(values))
}

/// Euclidean (L2) distance between two equal-length slices.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(squared_distance(a, b).sqrt())
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}
