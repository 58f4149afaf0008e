//! Confusion matrices, accuracy, classwise F1, and aggregation over runs.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    /// Row-major; `counts[i * k + j]` = gold `i` predicted as `j`.
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    /// Builds a matrix directly from row-major counts.
    pub fn from_counts(labels: Vec<String>, rows: Vec<Vec<u64>>) -> Result<Self> {
        let k = labels.len();
        if rows.len() != k || rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvariantViolation(format!(
                "confusion matrix must be {k}x{k}"
            )));
        }
        check_unique(&labels)?;
        Ok(Self {
            labels,
            counts: rows.into_iter().flatten().collect(),
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, gold: usize, pred: usize) -> u64 {
        self.counts[gold * self.labels.len() + pred]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts
            .chunks(self.labels.len().max(1))
            .map(<[u64]>::to_vec)
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.get(i, i)).sum()
    }

    fn row_sum(&self, i: usize) -> u64 {
        (0..self.labels.len()).map(|j| self.get(i, j)).sum()
    }

    fn column_sum(&self, j: usize) -> u64 {
        (0..self.labels.len()).map(|i| self.get(i, j)).sum()
    }
}

fn check_unique(labels: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::InvariantViolation(format!("duplicate label '{l}'")));
        }
    }
    Ok(())
}

/// Counts gold/predicted label pairs over `labels`.
pub fn confusion<G, P>(golds: &[G], preds: &[P], labels: &[String]) -> Result<ConfusionMatrix>
where
    G: AsRef<str>,
    P: AsRef<str>,
{
    if golds.len() != preds.len() {
        return Err(Error::LengthMismatch {
            golds: golds.len(),
            preds: preds.len(),
        });
    }
    if golds.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    check_unique(labels)?;
    let index: HashMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let lookup = |l: &str| {
        index
            .get(l)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(l.to_owned()))
    };
    let k = labels.len();
    let mut counts = vec![0u64; k * k];
    for (g, p) in golds.iter().zip(preds) {
        counts[lookup(g.as_ref())? * k + lookup(p.as_ref())?] += 1;
    }
    Ok(ConfusionMatrix {
        labels: labels.to_vec(),
        counts,
    })
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    Ok(cm.trace() as f64 / total as f64)
}

/// Per-class F1. Any zero denominator, or precision + recall == 0, gives 0.
pub fn classwise_f1(cm: &ConfusionMatrix) -> Result<BTreeMap<String, f64>> {
    if cm.total() == 0 {
        return Err(Error::EmptyMatrix);
    }
    Ok(cm
        .labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let tp = cm.get(i, i);
            let predicted = cm.column_sum(i);
            let actual = cm.row_sum(i);
            // 2PR / (P + R) reduces to 2tp / (actual + predicted); P + R == 0
            // exactly when tp == 0.
            let f1 = if predicted == 0 || actual == 0 || tp == 0 {
                0.0
            } else {
                (2 * tp) as f64 / (actual + predicted) as f64
            };
            (label.clone(), f1)
        })
        .collect())
}

/// Accuracy and per-class F1 of one evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub accuracy: f64,
    pub f1_per_class: BTreeMap<String, f64>,
}

impl RunMetrics {
    pub fn from_confusion(cm: &ConfusionMatrix) -> Result<Self> {
        Ok(Self {
            accuracy: accuracy(cm)?,
            f1_per_class: classwise_f1(cm)?,
        })
    }
}

/// Mean and sample standard deviation of run metrics across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateMetrics {
    pub mean: RunMetrics,
    pub std: RunMetrics,
    pub n_runs: usize,
}

/// Componentwise mean and `(n - 1)`-denominator standard deviation. A single
/// run has zero spread.
pub fn aggregate(runs: &[RunMetrics]) -> Result<AggregateMetrics> {
    let first = runs.first().ok_or(Error::EmptyRuns)?;
    if runs
        .iter()
        .any(|r| !r.f1_per_class.keys().eq(first.f1_per_class.keys()))
    {
        return Err(Error::LabelSetMismatch);
    }

    // Sorting makes the floating-point sums independent of run order.
    let summarize = |mut values: Vec<f64>| -> (f64, f64) {
        values.sort_by(f64::total_cmp);
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            let mut sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
            sq.sort_by(f64::total_cmp);
            (sq.iter().sum::<f64>() / (n - 1.0)).sqrt()
        };
        (mean, std)
    };

    let (acc_mean, acc_std) = summarize(runs.iter().map(|r| r.accuracy).collect());
    let mut f1_mean = BTreeMap::new();
    let mut f1_std = BTreeMap::new();
    for label in first.f1_per_class.keys() {
        let (m, s) = summarize(runs.iter().map(|r| r.f1_per_class[label]).collect());
        f1_mean.insert(label.clone(), m);
        f1_std.insert(label.clone(), s);
    }
    Ok(AggregateMetrics {
        mean: RunMetrics {
            accuracy: acc_mean,
            f1_per_class: f1_mean,
        },
        std: RunMetrics {
            accuracy: acc_std,
            f1_per_class: f1_std,
        },
        n_runs: runs.len(),
    })
}
