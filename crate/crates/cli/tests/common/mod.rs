#![allow(dead_code)]

use std::path::Path;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use seed_core::{save_embedded_dataset, EmbeddedDataset, EmbeddedPair, EmbeddingVector};

pub fn labels(ls: &[&str]) -> Vec<String> {
    ls.iter().map(|s| s.to_string()).collect()
}

/// Pair whose difference vector is exactly `diff`: the claim is random and
/// the evidence is offset from it with random signs.
pub fn pair_with_diff(rng: &mut StdRng, id: String, label: &str, diff: &[f64]) -> EmbeddedPair {
    let claim: Vec<f64> = diff.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let evidence: Vec<f64> = claim
        .iter()
        .zip(diff)
        .map(|(c, d)| if rng.gen_bool(0.5) { c + d } else { c - d })
        .collect();
    EmbeddedPair {
        id,
        label: label.into(),
        claim: EmbeddingVector::new(claim).unwrap(),
        evidence: EmbeddingVector::new(evidence).unwrap(),
    }
}

/// Three classes whose difference vectors sit in tight clusters: class `k`
/// is centred at `10 + 50 * e_k` with per-component jitter in
/// `[-jitter, jitter]`.
pub fn separable(per_class: usize, dim: usize, jitter: f64, seed: u64) -> EmbeddedDataset {
    let mut rng = StdRng::seed_from_u64(seed);
    let names = ["Contradict", "Neutral", "Support"];
    let mut pairs = Vec::new();
    for i in 0..per_class {
        for (k, name) in names.iter().enumerate() {
            let diff: Vec<f64> = (0..dim)
                .map(|j| 10.0 + if j == k { 50.0 } else { 0.0 } + rng.gen_range(-jitter..=jitter))
                .collect();
            pairs.push(pair_with_diff(&mut rng, format!("{name}-{i}"), name, &diff));
        }
    }
    EmbeddedDataset::new(dim, labels(&names), pairs).unwrap()
}

/// Every pair has the same claim and evidence embeddings; labels are drawn
/// uniformly at random.
pub fn null_model(size: usize, classes: &[&str], seed: u64) -> EmbeddedDataset {
    let mut rng = StdRng::seed_from_u64(seed);
    let claim = EmbeddingVector::new(vec![0.3, -1.2, 0.7, 2.0]).unwrap();
    let evidence = EmbeddingVector::new(vec![1.1, 0.4, -0.2, 2.5]).unwrap();
    let pairs = (0..size)
        .map(|i| EmbeddedPair {
            id: format!("p{i}"),
            label: classes[rng.gen_range(0..classes.len())].to_string(),
            claim: claim.clone(),
            evidence: evidence.clone(),
        })
        .collect();
    EmbeddedDataset::new(4, labels(classes), pairs).unwrap()
}

/// Random embeddings with some class-dependent signal.
pub fn noisy(per_class: usize, dim: usize, seed: u64) -> EmbeddedDataset {
    let mut rng = StdRng::seed_from_u64(seed);
    let names = ["Contradict", "Neutral", "Support"];
    let mut pairs = Vec::new();
    for i in 0..per_class {
        for (k, name) in names.iter().enumerate() {
            let diff: Vec<f64> = (0..dim)
                .map(|j| (if j % 3 == k { 1.0 } else { 0.0 }) + rng.gen_range(0.0..2.0))
                .collect();
            pairs.push(pair_with_diff(&mut rng, format!("{name}-{i}"), name, &diff));
        }
    }
    EmbeddedDataset::new(dim, labels(&names), pairs).unwrap()
}

pub fn write(ds: &EmbeddedDataset, path: &Path) {
    save_embedded_dataset(ds, path).unwrap();
}
