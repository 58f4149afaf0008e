//! Python bindings for `seed_core`.
//!
//! Vectors cross the boundary as lists of floats, label maps as dicts.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use seed_core::dataset::{self, DEFAULT_BINARY_CAP};
use seed_core::harness::{self, ConvergencePoint};
use seed_core::{
    AggregateMetrics, ClassRepresentative, ClassifierModel, DiffVector, EmbeddedDataset,
    EmbeddedPair, EmbeddingVector, Error, ExperimentConfig, RunMetrics,
};

create_exception!(
    seed_py,
    SeedError,
    PyValueError,
    "Invalid input to a seed_core operation."
);

fn to_py(e: Error) -> PyErr {
    match e.root() {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => SeedError::new_err(e.to_string()),
    }
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for seed_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn emb(v: Vec<f64>) -> PyResult<EmbeddingVector> {
    EmbeddingVector::new(v).py()
}

/// Component-wise |evidence - claim|.
#[pyfunction]
fn diff_vector(claim: Vec<f64>, evidence: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(seed_core::diff_vector(&emb(claim)?, &emb(evidence)?)
        .py()?
        .into_inner())
}

#[pyfunction]
fn euclidean_distance(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    seed_core::euclidean_distance(&a, &b).py()
}

/// Running mean of one class's difference vectors.
#[pyclass(name = "ClassRepresentative", module = "seed_py", from_py_object)]
#[derive(Clone)]
struct PyRepresentative {
    inner: ClassRepresentative,
}

#[pymethods]
impl PyRepresentative {
    #[new]
    #[pyo3(signature = (label, mean, count = 1))]
    fn new(label: String, mean: Vec<f64>, count: usize) -> PyResult<Self> {
        Ok(Self {
            inner: ClassRepresentative::new(label, mean, count).py()?,
        })
    }

    /// Absorbs one difference vector into the mean.
    fn push(&mut self, sample: Vec<f64>) -> PyResult<()> {
        self.inner.push(&DiffVector::new(sample).py()?).py()
    }

    #[getter]
    fn label(&self) -> &str {
        self.inner.label()
    }

    #[getter]
    fn mean(&self) -> Vec<f64> {
        self.inner.mean().to_vec()
    }

    #[getter]
    fn count(&self) -> usize {
        self.inner.count()
    }

    fn __repr__(&self) -> String {
        format!(
            "ClassRepresentative(label={:?}, count={})",
            self.inner.label(),
            self.inner.count()
        )
    }
}

/// Nearest-representative classifier. Immutable once fitted.
#[pyclass(name = "Model", module = "seed_py", frozen)]
struct PyModel {
    inner: ClassifierModel,
}

fn prediction_tuple(p: seed_core::Prediction) -> (String, BTreeMap<String, f64>) {
    (p.label, p.distances)
}

#[pymethods]
impl PyModel {
    /// Fits from parallel lists of labels and difference vectors.
    #[staticmethod]
    fn fit(labels: Vec<String>, diffs: Vec<Vec<f64>>) -> PyResult<Self> {
        if labels.len() != diffs.len() {
            return Err(SeedError::new_err(format!(
                "{} labels but {} difference vectors",
                labels.len(),
                diffs.len()
            )));
        }
        let diffs = diffs
            .into_iter()
            .map(DiffVector::new)
            .collect::<seed_core::Result<Vec<_>>>()
            .py()?;
        Ok(Self {
            inner: seed_core::fit(labels.iter().zip(&diffs)).py()?,
        })
    }

    /// Fits on every pair of a dataset.
    #[staticmethod]
    fn fit_dataset(dataset: &PyDataset) -> PyResult<Self> {
        Ok(Self {
            inner: seed_core::fit_pairs(dataset.inner.pairs()).py()?,
        })
    }

    #[staticmethod]
    fn from_representatives(dim: usize, reps: Vec<PyRepresentative>) -> PyResult<Self> {
        let reps = reps.into_iter().map(|r| r.inner).collect();
        Ok(Self {
            inner: ClassifierModel::new(dim, reps).py()?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: dataset::model_from_json(text).py()?,
        })
    }

    fn to_json(&self) -> String {
        dataset::model_to_json(&self.inner)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: seed_core::load_model(path).py()?,
        })
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        seed_core::save_model(&self.inner, path).py()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().map(str::to_owned).collect()
    }

    fn representatives(&self) -> Vec<PyRepresentative> {
        self.inner
            .representatives()
            .iter()
            .map(|r| PyRepresentative { inner: r.clone() })
            .collect()
    }

    /// Returns `(label, {class: distance})`.
    fn predict(
        &self,
        py: Python<'_>,
        claim: Vec<f64>,
        evidence: Vec<f64>,
    ) -> PyResult<(String, BTreeMap<String, f64>)> {
        let (claim, evidence) = (emb(claim)?, emb(evidence)?);
        py.detach(|| self.inner.predict(&claim, &evidence))
            .py()
            .map(prediction_tuple)
    }

    fn predict_diff(&self, diff: Vec<f64>) -> PyResult<(String, BTreeMap<String, f64>)> {
        self.inner
            .predict_diff(&DiffVector::new(diff).py()?)
            .py()
            .map(prediction_tuple)
    }

    fn predict_batch(
        &self,
        py: Python<'_>,
        dataset: &PyDataset,
    ) -> PyResult<Vec<(String, BTreeMap<String, f64>)>> {
        let preds = py
            .detach(|| self.inner.predict_batch(dataset.inner.pairs()))
            .py()?;
        Ok(preds.into_iter().map(prediction_tuple).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(dim={}, labels={:?})",
            self.inner.dim(),
            self.labels()
        )
    }
}

/// Labelled claim/evidence embedding pairs.
#[pyclass(name = "Dataset", module = "seed_py", frozen)]
struct PyDataset {
    inner: EmbeddedDataset,
}

#[pymethods]
impl PyDataset {
    /// Builds a dataset from `(id, label, claim, evidence)` tuples.
    #[new]
    fn new(
        dim: usize,
        labels: Vec<String>,
        records: Vec<(String, String, Vec<f64>, Vec<f64>)>,
    ) -> PyResult<Self> {
        let pairs = records
            .into_iter()
            .map(|(id, label, claim, evidence)| {
                Ok(EmbeddedPair {
                    id,
                    label,
                    claim: emb(claim)?,
                    evidence: emb(evidence)?,
                })
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self {
            inner: EmbeddedDataset::new(dim, labels, pairs).py()?,
        })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: seed_core::load_embedded_dataset(path).py()?,
        })
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        seed_core::save_embedded_dataset(&self.inner, path).py()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn ids(&self) -> Vec<String> {
        self.inner.pairs().iter().map(|p| p.id.clone()).collect()
    }

    #[getter]
    fn gold_labels(&self) -> Vec<String> {
        self.inner.pairs().iter().map(|p| p.label.clone()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Returns `(train, test)` with `n` training pairs per class.
    fn sample_shots(&self, n: usize, seed: u64) -> PyResult<(PyDataset, PyDataset)> {
        let (train, test) = seed_core::sample_shots(&self.inner, n, seed).py()?;
        Ok((PyDataset { inner: train }, PyDataset { inner: test }))
    }

    /// Support / Not_Support variant of a three-way dataset.
    #[pyo3(signature = (seed, cap = DEFAULT_BINARY_CAP))]
    fn binarize(&self, seed: u64, cap: usize) -> PyResult<PyDataset> {
        Ok(PyDataset {
            inner: seed_core::make_binary_fever(&self.inner, seed, cap).py()?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(len={}, dim={}, labels={:?})",
            self.inner.len(),
            self.inner.dim(),
            self.inner.labels()
        )
    }
}

/// Returns `(accuracy, {class: f1})` for gold and predicted label lists.
#[pyfunction]
fn evaluate_predictions(
    golds: Vec<String>,
    preds: Vec<String>,
    labels: Vec<String>,
) -> PyResult<(f64, BTreeMap<String, f64>)> {
    let cm = seed_core::confusion(&golds, &preds, &labels).py()?;
    let m = RunMetrics::from_confusion(&cm).py()?;
    Ok((m.accuracy, m.f1_per_class))
}

#[pyfunction]
fn confusion_matrix(
    golds: Vec<String>,
    preds: Vec<String>,
    labels: Vec<String>,
) -> PyResult<Vec<Vec<u64>>> {
    Ok(seed_core::confusion(&golds, &preds, &labels).py()?.rows())
}

/// Per-class `(mean, std)` summary of an aggregate, plus accuracy.
#[pyclass(name = "Aggregate", module = "seed_py", frozen, get_all)]
struct PyAggregate {
    accuracy_mean: f64,
    accuracy_std: f64,
    f1_mean: BTreeMap<String, f64>,
    f1_std: BTreeMap<String, f64>,
    n_runs: usize,
}

impl From<AggregateMetrics> for PyAggregate {
    fn from(a: AggregateMetrics) -> Self {
        Self {
            accuracy_mean: a.mean.accuracy,
            accuracy_std: a.std.accuracy,
            f1_mean: a.mean.f1_per_class,
            f1_std: a.std.f1_per_class,
            n_runs: a.n_runs,
        }
    }
}

#[pymethods]
impl PyAggregate {
    fn __repr__(&self) -> String {
        format!(
            "Aggregate(accuracy={:.6}±{:.6}, n_runs={})",
            self.accuracy_mean, self.accuracy_std, self.n_runs
        )
    }
}

/// Aggregates `(accuracy, {class: f1})` runs into mean and sample std.
#[pyfunction]
fn aggregate(runs: Vec<(f64, BTreeMap<String, f64>)>) -> PyResult<PyAggregate> {
    let runs: Vec<RunMetrics> = runs
        .into_iter()
        .map(|(accuracy, f1_per_class)| RunMetrics {
            accuracy,
            f1_per_class,
        })
        .collect();
    Ok(seed_core::aggregate(&runs).py()?.into())
}

fn experiment_config(shots: Option<Vec<usize>>, seeds: Option<Vec<u64>>) -> ExperimentConfig {
    let default = ExperimentConfig::default();
    ExperimentConfig {
        shot_counts: shots.unwrap_or(default.shot_counts),
        seeds: seeds.unwrap_or(default.seeds),
    }
}

/// Runs the n-shot sweep; returns `{n: Aggregate}`.
#[pyfunction]
#[pyo3(signature = (dataset, shots = None, seeds = None))]
fn run_experiment(
    py: Python<'_>,
    dataset: &PyDataset,
    shots: Option<Vec<usize>>,
    seeds: Option<Vec<u64>>,
) -> PyResult<BTreeMap<usize, PyAggregate>> {
    let config = experiment_config(shots, seeds);
    let results = py
        .detach(|| seed_core::run_nshot_experiment(&config, &dataset.inner))
        .py()?;
    Ok(results.into_iter().map(|(n, a)| (n, a.into())).collect())
}

/// Runs the sweep and writes the results CSV.
#[pyfunction]
#[pyo3(signature = (dataset, path, name, setting, shots = None, seeds = None))]
fn write_experiment_report(
    py: Python<'_>,
    dataset: &PyDataset,
    path: std::path::PathBuf,
    name: &str,
    setting: &str,
    shots: Option<Vec<usize>>,
    seeds: Option<Vec<u64>>,
) -> PyResult<()> {
    let config = experiment_config(shots, seeds);
    py.detach(|| {
        let results = seed_core::run_nshot_experiment(&config, &dataset.inner)?;
        seed_core::emit_report(name, setting, &results, &path)
    })
    .py()
}

type CurveRow = (usize, BTreeMap<String, f64>, f64);

/// Returns `[(n, {class: distance}, mean_distance), ...]` for n = 2..=max_n.
#[pyfunction]
fn convergence_curve(dataset: &PyDataset, max_n: usize, seed: u64) -> PyResult<Vec<CurveRow>> {
    Ok(seed_core::convergence_curve(&dataset.inner, max_n, seed)
        .py()?
        .into_iter()
        .map(|ConvergencePoint { n, per_class, mean }| (n, per_class, mean))
        .collect())
}

#[pymodule]
pub fn seed_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SeedError", m.py().get_type::<SeedError>())?;
    m.add("DEFAULT_SHOT_COUNTS", harness::DEFAULT_SHOT_COUNTS.to_vec())?;
    m.add("DEFAULT_SEEDS", harness::DEFAULT_SEEDS.collect::<Vec<_>>())?;
    m.add_class::<PyRepresentative>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyAggregate>()?;
    m.add_function(wrap_pyfunction!(diff_vector, m)?)?;
    m.add_function(wrap_pyfunction!(euclidean_distance, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_predictions, m)?)?;
    m.add_function(wrap_pyfunction!(confusion_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(write_experiment_report, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_curve, m)?)?;
    Ok(())
}
