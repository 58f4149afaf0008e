//! Embedded claim/evidence datasets: the JSON Lines file format, model
//! files, and the binary Support / Not_Support variant.
//!
//! Embedding file layout, one JSON object per line:
//!
//! ```text
//! {"format":"seed-embeddings","version":1,"dim":3,"labels":["Contradict","Neutral","Support"]}
//! {"id":"c1","label":"Support","claim":[0.1,0.2,0.3],"evidence":[0.0,0.2,0.5]}
//! ...
//! ```

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::{ClassRepresentative, ClassifierModel};
use crate::error::{Error, Result};
use crate::rng::Pcg32;
use crate::vector::{diff_vector, DiffVector, EmbeddingVector};

pub const FORMAT_NAME: &str = "seed-embeddings";
pub const FORMAT_VERSION: u32 = 1;

pub const SUPPORT: &str = "Support";
pub const CONTRADICT: &str = "Contradict";
pub const NEUTRAL: &str = "Neutral";
pub const NOT_SUPPORT: &str = "Not_Support";

/// Per-class size of the binary dataset.
pub const DEFAULT_BINARY_CAP: usize = 3333;

/// One labelled claim/evidence pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedPair {
    pub id: String,
    pub label: String,
    pub claim: EmbeddingVector,
    pub evidence: EmbeddingVector,
}

impl EmbeddedPair {
    pub fn diff(&self) -> Result<DiffVector> {
        diff_vector(&self.claim, &self.evidence)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedDataset {
    pairs: Vec<EmbeddedPair>,
    labels: Vec<String>,
    dim: usize,
}

impl EmbeddedDataset {
    /// Validates and builds a dataset. `labels` is sorted and deduplicated;
    /// every pair must carry one of them, all embeddings must have length
    /// `dim`, and ids must be unique.
    pub fn new(dim: usize, labels: Vec<String>, pairs: Vec<EmbeddedPair>) -> Result<Self> {
        let mut labels = labels;
        labels.sort();
        labels.dedup();
        for (i, pair) in pairs.iter().enumerate() {
            validate_pair(pair, dim, &labels)
                .map_err(|e| Error::InvariantViolation(format!("pair {i} ('{}'): {e}", pair.id)))?;
        }
        let mut seen = HashSet::with_capacity(pairs.len());
        for pair in &pairs {
            if !seen.insert(pair.id.as_str()) {
                return Err(Error::DuplicateId(pair.id.clone()));
            }
        }
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(Self { pairs, labels, dim })
    }

    pub fn pairs(&self) -> &[EmbeddedPair] {
        &self.pairs
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Indices of the pairs labelled `label`, in dataset order.
    pub fn class_indices(&self, label: &str) -> Vec<usize> {
        self.pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.label == label)
            .map(|(i, _)| i)
            .collect()
    }

    /// Same labels and dimension, different rows. Rows come from an already
    /// validated dataset so no re-checking is needed.
    pub(crate) fn with_pairs(&self, pairs: Vec<EmbeddedPair>) -> Self {
        Self {
            pairs,
            labels: self.labels.clone(),
            dim: self.dim,
        }
    }
}

fn validate_pair(pair: &EmbeddedPair, dim: usize, labels: &[String]) -> Result<()> {
    if labels.binary_search(&pair.label).is_err() {
        return Err(Error::UnknownLabel(pair.label.clone()));
    }
    for v in [&pair.claim, &pair.evidence] {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.dim(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct FileHeader {
    format: String,
    version: u32,
    dim: usize,
    labels: Vec<String>,
}

/// On-disk form of one pair.
#[derive(Debug, Serialize, Deserialize)]
pub struct EmbeddingFileRecord {
    pub id: String,
    pub label: String,
    pub claim: Vec<f64>,
    pub evidence: Vec<f64>,
}

impl EmbeddingFileRecord {
    fn into_pair(self, dim: usize) -> Result<EmbeddedPair> {
        if self.claim.len() != self.evidence.len() {
            return Err(Error::DimensionMismatch {
                expected: self.claim.len(),
                actual: self.evidence.len(),
            });
        }
        if self.claim.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: self.claim.len(),
            });
        }
        Ok(EmbeddedPair {
            id: self.id,
            label: self.label,
            claim: EmbeddingVector::new(self.claim)?,
            evidence: EmbeddingVector::new(self.evidence)?,
        })
    }
}

/// Loads and validates an embedding file. Every failure names the offending
/// line.
pub fn load_embedded_dataset(path: impl AsRef<Path>) -> Result<EmbeddedDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_embedded_dataset(BufReader::new(file), path)
}

/// Reader-based variant of [`load_embedded_dataset`]; `origin` is only used
/// in diagnostics.
pub fn read_embedded_dataset(reader: impl BufRead, origin: &Path) -> Result<EmbeddedDataset> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    let mut header: Option<FileHeader> = None;
    let mut pairs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let Some(h) = &header else {
            let h: FileHeader = serde_json::from_str(&line)
                .map_err(|e| parse_err(lineno, format!("invalid header: {e}")))?;
            if h.format != FORMAT_NAME || h.version != FORMAT_VERSION {
                return Err(parse_err(
                    lineno,
                    format!(
                        "unsupported format '{}' version {}, expected '{FORMAT_NAME}' version {FORMAT_VERSION}",
                        h.format, h.version
                    ),
                ));
            }
            if h.dim == 0 {
                return Err(parse_err(lineno, "dim must be positive".into()));
            }
            if h.labels.is_empty() {
                return Err(parse_err(lineno, "labels must be non-empty".into()));
            }
            let unique: HashSet<&String> = h.labels.iter().collect();
            if unique.len() != h.labels.len() {
                return Err(parse_err(lineno, "labels must be unique".into()));
            }
            header = Some(h);
            continue;
        };
        let record: EmbeddingFileRecord =
            serde_json::from_str(&line).map_err(|e| parse_err(lineno, e.to_string()))?;
        let pair = record
            .into_pair(h.dim)
            .and_then(|p| {
                if h.labels.contains(&p.label) {
                    Ok(p)
                } else {
                    Err(Error::UnknownLabel(p.label))
                }
            })
            .map_err(|e| e.at_line(origin, lineno))?;
        if !seen.insert(pair.id.clone()) {
            return Err(Error::DuplicateId(pair.id).at_line(origin, lineno));
        }
        pairs.push(pair);
    }
    let header = header.ok_or_else(|| parse_err(0, "missing header line".into()))?;
    EmbeddedDataset::new(header.dim, header.labels, pairs)
}

pub fn save_embedded_dataset(dataset: &EmbeddedDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_embedded_dataset(dataset, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_embedded_dataset(
    dataset: &EmbeddedDataset,
    out: &mut impl Write,
) -> std::io::Result<()> {
    let header = FileHeader {
        format: FORMAT_NAME.into(),
        version: FORMAT_VERSION,
        dim: dataset.dim,
        labels: dataset.labels.clone(),
    };
    serde_json::to_writer(&mut *out, &header)?;
    writeln!(out)?;
    for p in &dataset.pairs {
        let record = EmbeddingFileRecord {
            id: p.id.clone(),
            label: p.label.clone(),
            claim: p.claim.to_vec(),
            evidence: p.evidence.to_vec(),
        };
        serde_json::to_writer(&mut *out, &record)?;
        writeln!(out)?;
    }
    Ok(())
}

/// Builds the two-class Support / Not_Support variant of a three-way
/// dataset.
///
/// The per-class size is `min(cap, #Support)`. Support is subsampled to that
/// size only when it has more rows; Not_Support merges `ceil(size / 2)`
/// Contradict and `floor(size / 2)` Neutral rows drawn with [`Pcg32`]
/// seeded by `seed`. Kept rows stay in source order.
pub fn make_binary_fever(
    dataset: &EmbeddedDataset,
    seed: u64,
    cap: usize,
) -> Result<EmbeddedDataset> {
    for required in [SUPPORT, CONTRADICT, NEUTRAL] {
        if !dataset.labels.iter().any(|l| l == required) {
            return Err(Error::MissingClass(required.into()));
        }
    }
    let support = dataset.class_indices(SUPPORT);
    let size = cap.min(support.len());
    let from_contradict = size.div_ceil(2);
    let from_neutral = size / 2;

    let mut rng = Pcg32::new(seed);
    let mut draw = |label: &str, indices: Vec<usize>, n: usize| -> Result<Vec<usize>> {
        if indices.len() < n {
            return Err(Error::InsufficientClassSize {
                label: label.into(),
                available: indices.len(),
                required: n,
            });
        }
        let mut indices = indices;
        if indices.len() > n {
            rng.partial_shuffle(&mut indices, n);
            indices.truncate(n);
        }
        Ok(indices)
    };
    let mut keep = vec![None; dataset.len()];
    for i in draw(SUPPORT, support, size)? {
        keep[i] = Some(SUPPORT);
    }
    for i in draw(
        CONTRADICT,
        dataset.class_indices(CONTRADICT),
        from_contradict,
    )? {
        keep[i] = Some(NOT_SUPPORT);
    }
    for i in draw(NEUTRAL, dataset.class_indices(NEUTRAL), from_neutral)? {
        keep[i] = Some(NOT_SUPPORT);
    }

    let pairs = dataset
        .pairs
        .iter()
        .zip(keep)
        .filter_map(|(p, label)| {
            label.map(|l| EmbeddedPair {
                label: l.to_owned(),
                ..p.clone()
            })
        })
        .collect();
    EmbeddedDataset::new(dataset.dim, vec![NOT_SUPPORT.into(), SUPPORT.into()], pairs)
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    dim: usize,
    classes: Vec<ModelClass>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelClass {
    label: String,
    count: usize,
    mean: Vec<f64>,
}

pub fn model_to_json(model: &ClassifierModel) -> String {
    let file = ModelFile {
        dim: model.dim(),
        classes: model
            .representatives()
            .iter()
            .map(|r| ModelClass {
                label: r.label().to_owned(),
                count: r.count(),
                mean: r.mean().to_vec(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("model serialization is infallible")
}

/// Parses and re-validates a model document. Unsorted or duplicate classes
/// are rejected rather than repaired.
pub fn model_from_json(text: &str) -> Result<ClassifierModel> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: "<model>".into(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let reps = file
        .classes
        .into_iter()
        .map(|c| ClassRepresentative::new(c.label, c.mean, c.count))
        .collect::<Result<Vec<_>>>()?;
    ClassifierModel::new(file.dim, reps)
}

pub fn save_model(model: &ClassifierModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = model_to_json(model);
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ClassifierModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&text).map_err(|e| match e {
        Error::Parse { line, message, .. } => Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        },
        other => other,
    })
}
