//! Class representative vectors and nearest-representative prediction.
//!
//! Each class is summarised by the arithmetic mean of the difference vectors
//! of its training pairs. A query pair is assigned the label of the
//! representative closest to its own difference vector in Euclidean distance.
//! Ties go to the lexicographically smallest label.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::dataset::EmbeddedPair;
use crate::error::{Error, Result};
use crate::vector::{diff_vector, squared_distance, DiffVector, EmbeddingVector};

/// Running mean of one class's difference vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassRepresentative {
    label: String,
    mean: Vec<f64>,
    count: usize,
}

impl ClassRepresentative {
    /// Builds a representative from stored values, validating its invariants.
    pub fn new(label: impl Into<String>, mean: Vec<f64>, count: usize) -> Result<Self> {
        let label = label.into();
        if count == 0 {
            return Err(Error::InvariantViolation(format!(
                "class '{label}' has count 0"
            )));
        }
        // Reuses the finiteness and sign checks.
        let mean = DiffVector::new(mean)
            .map_err(|e| Error::InvariantViolation(format!("class '{label}': {e}")))?
            .into_inner();
        Ok(Self { label, mean, count })
    }

    /// A representative of a single sample is the sample itself.
    pub fn from_sample(label: impl Into<String>, sample: &DiffVector) -> Self {
        Self {
            label: label.into(),
            mean: sample.to_vec(),
            count: 1,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Absorbs one more sample: `mean += (sample - mean) / (count + 1)`.
    pub fn push(&mut self, sample: &DiffVector) -> Result<()> {
        if sample.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: sample.dim(),
            });
        }
        self.count += 1;
        let n = self.count as f64;
        for (m, &x) in self.mean.iter_mut().zip(sample.iter()) {
            *m += (x - *m) / n;
            // Rounding can push a zero-valued mean a hair below zero.
            if *m < 0.0 {
                *m = 0.0;
            }
        }
        Ok(())
    }
}

/// Returns `rep` with one more sample absorbed, leaving `rep` untouched.
pub fn fit_incremental(
    rep: &ClassRepresentative,
    sample: &DiffVector,
) -> Result<ClassRepresentative> {
    let mut next = rep.clone();
    next.push(sample)?;
    Ok(next)
}

/// Label-ordered set of class representatives sharing one dimension.
///
/// Immutable once built; `predict` takes `&self` and may be called from
/// many threads at once.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    dim: usize,
    representatives: Vec<ClassRepresentative>,
}

impl ClassifierModel {
    /// Validates that representatives are non-empty, share `dim`, and are
    /// strictly sorted by label (which also rules out duplicates).
    pub fn new(dim: usize, representatives: Vec<ClassRepresentative>) -> Result<Self> {
        if representatives.is_empty() {
            return Err(Error::EmptyModel);
        }
        if dim == 0 {
            return Err(Error::InvariantViolation("model dimension is 0".into()));
        }
        for rep in &representatives {
            if rep.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: rep.dim(),
                });
            }
        }
        for pair in representatives.windows(2) {
            if pair[0].label >= pair[1].label {
                return Err(Error::InvariantViolation(format!(
                    "classes not strictly sorted: '{}' before '{}'",
                    pair[0].label, pair[1].label
                )));
            }
        }
        Ok(Self {
            dim,
            representatives,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn representatives(&self) -> &[ClassRepresentative] {
        &self.representatives
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.representatives.iter().map(|r| r.label.as_str())
    }

    pub fn get(&self, label: &str) -> Option<&ClassRepresentative> {
        self.representatives
            .binary_search_by(|r| r.label.as_str().cmp(label))
            .ok()
            .map(|i| &self.representatives[i])
    }

    /// Classifies a precomputed difference vector.
    pub fn predict_diff(&self, query: &DiffVector) -> Result<Prediction> {
        if query.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: query.dim(),
            });
        }
        let mut distances = BTreeMap::new();
        let mut best: Option<(&str, f64)> = None;
        // Representatives are sorted, so a strict comparison keeps the
        // smallest label on ties.
        for rep in &self.representatives {
            let d = squared_distance(query, &rep.mean).sqrt();
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((&rep.label, d));
            }
            distances.insert(rep.label.clone(), d);
        }
        let (label, _) = best.ok_or(Error::EmptyModel)?;
        Ok(Prediction {
            label: label.to_owned(),
            distances,
        })
    }

    pub fn predict(
        &self,
        claim: &EmbeddingVector,
        evidence: &EmbeddingVector,
    ) -> Result<Prediction> {
        if claim.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: claim.dim(),
            });
        }
        self.predict_diff(&diff_vector(claim, evidence)?)
    }

    /// Predicts every pair, preserving input order.
    pub fn predict_batch(&self, pairs: &[EmbeddedPair]) -> Result<Vec<Prediction>> {
        pairs
            .par_iter()
            .map(|p| self.predict(&p.claim, &p.evidence))
            .collect()
    }
}

/// Predicted label plus the distance to every class representative.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: String,
    pub distances: BTreeMap<String, f64>,
}

/// Fits one representative per distinct label as the plain mean
/// `(1/n) * sum(D_i)` of that label's difference vectors.
pub fn fit<'a, I, L>(samples: I) -> Result<ClassifierModel>
where
    I: IntoIterator<Item = (L, &'a DiffVector)>,
    L: AsRef<str>,
{
    let mut sums: BTreeMap<String, (Vec<f64>, usize)> = BTreeMap::new();
    let mut dim = None;
    for (label, sample) in samples {
        let expected = *dim.get_or_insert(sample.dim());
        if sample.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: sample.dim(),
            });
        }
        let (sum, count) = sums
            .entry(label.as_ref().to_owned())
            .or_insert_with(|| (vec![0.0; expected], 0));
        for (s, &x) in sum.iter_mut().zip(sample.iter()) {
            *s += x;
        }
        *count += 1;
    }
    let dim = dim.ok_or(Error::EmptyTrainingSet)?;
    let representatives = sums
        .into_iter()
        .map(|(label, (sum, count))| {
            let n = count as f64;
            let mean = sum.into_iter().map(|s| s / n).collect();
            ClassRepresentative::new(label, mean, count)
        })
        .collect::<Result<Vec<_>>>()?;
    ClassifierModel::new(dim, representatives)
}

/// Convenience wrapper: computes each pair's difference vector, then fits.
pub fn fit_pairs(pairs: &[EmbeddedPair]) -> Result<ClassifierModel> {
    let diffs = pairs
        .iter()
        .map(|p| Ok((p.label.as_str(), p.diff()?)))
        .collect::<Result<Vec<_>>>()?;
    fit(diffs.iter().map(|(l, d)| (*l, d)))
}
