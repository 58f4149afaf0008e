//! Few-shot claim veracity classification from sentence-embedding
//! differences.
//!
//! Every claim/evidence pair becomes the component-wise absolute difference
//! of the two embeddings. Each class is represented by the mean of its
//! training differences, and a new pair takes the label of the nearest
//! representative. The [`harness`] module runs the n-shot evaluation sweep
//! over shot counts and seeds.

pub mod classifier;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod rng;
pub mod vector;

pub use classifier::{
    fit, fit_incremental, fit_pairs, ClassRepresentative, ClassifierModel, Prediction,
};
pub use dataset::{
    load_embedded_dataset, load_model, make_binary_fever, save_embedded_dataset, save_model,
    EmbeddedDataset, EmbeddedPair,
};
pub use error::{Error, Result};
pub use harness::{
    convergence_curve, emit_convergence, emit_report, run_nshot_experiment, sample_shots,
    ConvergencePoint, ExperimentConfig,
};
pub use metrics::{
    accuracy, aggregate, classwise_f1, confusion, AggregateMetrics, ConfusionMatrix, RunMetrics,
};
pub use vector::{diff_vector, euclidean_distance, DiffVector, EmbeddingVector};
