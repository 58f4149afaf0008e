//! n-shot sampling, the seed x shot-count sweep, the convergence curve of
//! class representatives, and CSV report output.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::classifier::{fit_pairs, ClassRepresentative};
use crate::dataset::{EmbeddedDataset, EmbeddedPair};
use crate::error::{Error, Result};
use crate::metrics::{aggregate, confusion, AggregateMetrics, RunMetrics};
use crate::rng::Pcg32;
use crate::vector::euclidean_distance;

pub const DEFAULT_SHOT_COUNTS: [usize; 10] = [2, 4, 6, 8, 10, 20, 30, 40, 50, 100];
pub const DEFAULT_SEEDS: std::ops::RangeInclusive<u64> = 123..=132;

/// Label used for the across-class average in the convergence CSV.
pub const MEAN_ROW_LABEL: &str = "__mean__";

fn check_class_sizes(dataset: &EmbeddedDataset, required: usize, strict: bool) -> Result<()> {
    for label in dataset.labels() {
        let available = dataset.class_indices(label).len();
        let ok = if strict {
            available > required
        } else {
            available >= required
        };
        if !ok {
            return Err(Error::InsufficientClassSize {
                label: label.clone(),
                available,
                required: if strict { required + 1 } else { required },
            });
        }
    }
    Ok(())
}

/// Draws `n` training pairs per class; everything else is the test set.
///
/// One [`Pcg32`] seeded with `seed` walks the classes in sorted label order,
/// running a partial Fisher-Yates over each class's indices (in dataset
/// order) and taking the first `n` slots. Train pairs are grouped by class in
/// draw order; test pairs keep dataset order.
pub fn sample_shots(
    dataset: &EmbeddedDataset,
    n: usize,
    seed: u64,
) -> Result<(EmbeddedDataset, EmbeddedDataset)> {
    if n == 0 {
        return Err(Error::InvalidConfig("shot count must be positive".into()));
    }
    check_class_sizes(dataset, n, true)?;
    let mut rng = Pcg32::new(seed);
    let mut in_train = vec![false; dataset.len()];
    let mut train = Vec::with_capacity(n * dataset.labels().len());
    for label in dataset.labels() {
        let mut indices = dataset.class_indices(label);
        rng.partial_shuffle(&mut indices, n);
        for &i in &indices[..n] {
            in_train[i] = true;
            train.push(dataset.pairs()[i].clone());
        }
    }
    let test: Vec<EmbeddedPair> = dataset
        .pairs()
        .iter()
        .zip(&in_train)
        .filter(|(_, &t)| !t)
        .map(|(p, _)| p.clone())
        .collect();
    Ok((dataset.with_pairs(train), dataset.with_pairs(test)))
}

/// Fits on `train` and scores predictions on `test`.
pub fn evaluate(train: &EmbeddedDataset, test: &EmbeddedDataset) -> Result<RunMetrics> {
    let model = fit_pairs(train.pairs())?;
    let preds = model.predict_batch(test.pairs())?;
    let golds: Vec<&str> = test.pairs().iter().map(|p| p.label.as_str()).collect();
    let preds: Vec<&str> = preds.iter().map(|p| p.label.as_str()).collect();
    RunMetrics::from_confusion(&confusion(&golds, &preds, test.labels())?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub shot_counts: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            shot_counts: DEFAULT_SHOT_COUNTS.to_vec(),
            seeds: DEFAULT_SEEDS.collect(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self, dataset: &EmbeddedDataset) -> Result<()> {
        if self.shot_counts.is_empty() {
            return Err(Error::InvalidConfig("no shot counts".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("no seeds".into()));
        }
        if self.shot_counts[0] == 0 || self.shot_counts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(format!(
                "shot counts must be positive and strictly ascending: {:?}",
                self.shot_counts
            )));
        }
        let max_n = *self.shot_counts.last().expect("non-empty");
        check_class_sizes(dataset, max_n, true)
    }
}

/// Runs every (shot count, seed) cell and aggregates over seeds.
pub fn run_nshot_experiment(
    config: &ExperimentConfig,
    dataset: &EmbeddedDataset,
) -> Result<BTreeMap<usize, AggregateMetrics>> {
    config.validate(dataset)?;
    let cells: Vec<(usize, u64)> = config
        .shot_counts
        .iter()
        .flat_map(|&n| config.seeds.iter().map(move |&s| (n, s)))
        .collect();
    // Collecting from an indexed parallel iterator keeps cell order.
    let runs = cells
        .par_iter()
        .map(|&(n, seed)| {
            let (train, test) = sample_shots(dataset, n, seed)?;
            evaluate(&train, &test)
        })
        .collect::<Result<Vec<_>>>()?;
    config
        .shot_counts
        .iter()
        .zip(runs.chunks(config.seeds.len()))
        .map(|(&n, chunk)| Ok((n, aggregate(chunk)?)))
        .collect()
}

/// How far each class representative moved when the n-th shot was added.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergencePoint {
    pub n: usize,
    pub per_class: BTreeMap<String, f64>,
    pub mean: f64,
}

/// Walks n = 2..=max_n over one seeded per-class ordering, recording
/// `||Relation_c(n) - Relation_c(n-1)||` for every class.
///
/// Orderings come from a partial Fisher-Yates (first `max_n` slots) per
/// class, classes in sorted label order, all from one [`Pcg32`] seeded with
/// `seed`.
pub fn convergence_curve(
    dataset: &EmbeddedDataset,
    max_n: usize,
    seed: u64,
) -> Result<Vec<ConvergencePoint>> {
    if max_n < 2 {
        return Err(Error::InvalidConfig("max_n must be at least 2".into()));
    }
    check_class_sizes(dataset, max_n, false)?;
    let mut rng = Pcg32::new(seed);
    let mut per_class_steps: Vec<(String, Vec<f64>)> = Vec::new();
    for label in dataset.labels() {
        let mut indices = dataset.class_indices(label);
        rng.partial_shuffle(&mut indices, max_n);
        let diffs = indices[..max_n]
            .iter()
            .map(|&i| dataset.pairs()[i].diff())
            .collect::<Result<Vec<_>>>()?;
        let mut rep = ClassRepresentative::from_sample(label.clone(), &diffs[0]);
        let mut steps = Vec::with_capacity(max_n - 1);
        for sample in &diffs[1..] {
            let previous = rep.mean().to_vec();
            rep.push(sample)?;
            steps.push(euclidean_distance(rep.mean(), &previous)?);
        }
        per_class_steps.push((label.clone(), steps));
    }
    let k = per_class_steps.len() as f64;
    Ok((2..=max_n)
        .map(|n| {
            let per_class: BTreeMap<String, f64> = per_class_steps
                .iter()
                .map(|(label, steps)| (label.clone(), steps[n - 2]))
                .collect();
            let mean = per_class.values().sum::<f64>() / k;
            ConvergencePoint { n, per_class, mean }
        })
        .collect())
}

/// One line of the results CSV. `class` is empty for accuracy rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub dataset: String,
    pub setting: String,
    pub n_shots: usize,
    pub metric: String,
    pub class: String,
    pub mean: f64,
    pub std: f64,
}

const REPORT_HEADER: [&str; 7] = [
    "dataset", "setting", "n_shots", "metric", "class", "mean", "std",
];

/// Flattens aggregated results into rows sorted by (n_shots, metric, class).
pub fn report_rows(
    dataset: &str,
    setting: &str,
    results: &BTreeMap<usize, AggregateMetrics>,
) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for (&n, agg) in results {
        let row = |metric: &str, class: &str, mean: f64, std: f64| ReportRow {
            dataset: dataset.into(),
            setting: setting.into(),
            n_shots: n,
            metric: metric.into(),
            class: class.into(),
            mean,
            std,
        };
        rows.push(row("accuracy", "", agg.mean.accuracy, agg.std.accuracy));
        for (label, &m) in &agg.mean.f1_per_class {
            rows.push(row("f1", label, m, agg.std.f1_per_class[label]));
        }
    }
    rows.sort_by(|a, b| (a.n_shots, &a.metric, &a.class).cmp(&(b.n_shots, &b.metric, &b.class)));
    rows
}

pub fn write_report(rows: &[ReportRow], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in rows {
        w.write_record([
            r.dataset.as_str(),
            &r.setting,
            &r.n_shots.to_string(),
            &r.metric,
            &r.class,
            &format!("{:.6}", r.mean),
            &format!("{:.6}", r.std),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Writes the results CSV for one dataset/setting.
pub fn emit_report(
    dataset: &str,
    setting: &str,
    results: &BTreeMap<usize, AggregateMetrics>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    if results.is_empty() {
        return Err(Error::InvalidConfig("no results to report".into()));
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_report(&report_rows(dataset, setting, results), file).map_err(|e| csv_error(path, e))
}

pub fn read_report(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_report(file, path)
}

fn parse_report(input: impl Read, origin: &Path) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| csv_error(origin, e))?;
    if header.iter().ne(REPORT_HEADER) {
        return Err(Error::Parse {
            path: origin.to_path_buf(),
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_error(origin, e))?;
        let line = i + 2;
        let bad = |what: &str| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message: format!("invalid {what}"),
        };
        rows.push(ReportRow {
            dataset: record[0].to_owned(),
            setting: record[1].to_owned(),
            n_shots: record[2].parse().map_err(|_| bad("n_shots"))?,
            metric: record[3].to_owned(),
            class: record[4].to_owned(),
            mean: record[5].parse().map_err(|_| bad("mean"))?,
            std: record[6].parse().map_err(|_| bad("std"))?,
        });
    }
    Ok(rows)
}

/// Writes `n,class,distance` rows, each n followed by its `__mean__` row.
/// Distances use shortest round-trip formatting.
pub fn write_convergence(points: &[ConvergencePoint], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "class", "distance"])?;
    for p in points {
        let n = p.n.to_string();
        for (label, d) in &p.per_class {
            w.write_record([n.as_str(), label, &d.to_string()])?;
        }
        w.write_record([n.as_str(), MEAN_ROW_LABEL, &p.mean.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_convergence(points: &[ConvergencePoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_convergence(points, file).map_err(|e| csv_error(path, e))
}
