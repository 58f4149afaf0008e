use proptest::prelude::*;
use seed_core::*;

fn vec_of(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, dim)
}

fn emb(v: Vec<f64>) -> EmbeddingVector {
    EmbeddingVector::new(v).unwrap()
}

fn pair_of_vecs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..32).prop_flat_map(|d| (vec_of(d), vec_of(d)))
}

fn labelled_samples() -> impl Strategy<Value = Vec<(u8, Vec<f64>)>> {
    (1usize..8).prop_flat_map(|d| {
        prop::collection::vec((0u8..4, prop::collection::vec(0.0f64..50.0, d)), 1..60)
    })
}

fn run_metrics() -> impl Strategy<Value = RunMetrics> {
    (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(a, f, g)| RunMetrics {
        accuracy: a,
        f1_per_class: [("A".to_string(), f), ("B".to_string(), g)]
            .into_iter()
            .collect(),
    })
}

proptest! {
    #[test]
    fn diff_is_symmetric_and_non_negative((a, b) in pair_of_vecs()) {
        let ab = diff_vector(&emb(a.clone()), &emb(b.clone())).unwrap();
        let ba = diff_vector(&emb(b), &emb(a)).unwrap();
        prop_assert_eq!(&ab, &ba);
        prop_assert!(ab.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn fit_is_permutation_invariant(samples in labelled_samples(), seed in any::<u64>()) {
        let diffs: Vec<(String, DiffVector)> = samples
            .into_iter()
            .map(|(l, v)| (format!("L{l}"), DiffVector::new(v).unwrap()))
            .collect();
        let mut shuffled = diffs.clone();
        rng::Pcg32::new(seed).partial_shuffle(&mut shuffled, usize::MAX);
        let a = fit(diffs.iter().map(|(l, d)| (l.as_str(), d))).unwrap();
        let b = fit(shuffled.iter().map(|(l, d)| (l.as_str(), d))).unwrap();
        for (ra, rb) in a.representatives().iter().zip(b.representatives()) {
            prop_assert_eq!(ra.label(), rb.label());
            prop_assert_eq!(ra.count(), rb.count());
            for (x, y) in ra.mean().iter().zip(rb.mean()) {
                prop_assert!((x - y).abs() < 1e-9);
                prop_assert!(*x >= 0.0);
            }
        }
    }

    #[test]
    fn single_sample_per_class_is_a_fixpoint(samples in labelled_samples()) {
        let mut seen = std::collections::BTreeMap::new();
        for (l, v) in samples {
            seen.entry(format!("L{l}")).or_insert_with(|| DiffVector::new(v).unwrap());
        }
        let model = fit(seen.iter().map(|(l, d)| (l.as_str(), d))).unwrap();
        for (l, d) in &seen {
            prop_assert_eq!(model.get(l).unwrap().mean(), d.as_slice());
        }
    }

    #[test]
    fn incremental_update_moves_by_exact_fraction(
        (mean, sample) in (1usize..16).prop_flat_map(|d| (
            prop::collection::vec(0.0f64..50.0, d),
            prop::collection::vec(0.0f64..50.0, d),
        )),
        count in 1usize..1000,
    ) {
        let rep = ClassRepresentative::new("c", mean.clone(), count).unwrap();
        let sample = DiffVector::new(sample).unwrap();
        let next = fit_incremental(&rep, &sample).unwrap();
        let moved = euclidean_distance(next.mean(), &mean).unwrap();
        let expected = euclidean_distance(&sample, &mean).unwrap() / (count + 1) as f64;
        prop_assert!((moved - expected).abs() < 1e-9);
    }

    #[test]
    fn incremental_chain_equals_batch(
        seq in (1usize..8).prop_flat_map(|d| prop::collection::vec(prop::collection::vec(0.0f64..10.0, d), 1..1000))
    ) {
        let seq: Vec<DiffVector> = seq.into_iter().map(|v| DiffVector::new(v).unwrap()).collect();
        let mut rep = ClassRepresentative::from_sample("c", &seq[0]);
        for s in &seq[1..] {
            rep.push(s).unwrap();
        }
        let batch = fit(seq.iter().map(|d| ("c", d))).unwrap();
        for (x, y) in rep.mean().iter().zip(batch.representatives()[0].mean()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn scaling_scales_distances_and_keeps_label(
        samples in labelled_samples(),
        query in any::<u64>(),
        lambda in 0.01f64..100.0,
    ) {
        let dim = samples[0].1.len();
        let scale = |v: &[f64], s: f64| v.iter().map(|x| x * s).collect::<Vec<_>>();
        let build = |s: f64| {
            let diffs: Vec<(String, DiffVector)> = samples
                .iter()
                .map(|(l, v)| (format!("L{l}"), DiffVector::new(scale(v, s)).unwrap()))
                .collect();
            fit(diffs.iter().map(|(l, d)| (l.as_str(), d))).unwrap()
        };
        let mut g = rng::Pcg32::new(query);
        let claim: Vec<f64> = (0..dim).map(|_| g.next_u32() as f64 / 1e8).collect();
        let evidence: Vec<f64> = (0..dim).map(|_| g.next_u32() as f64 / 1e8).collect();
        let base = build(1.0).predict(&emb(claim.clone()), &emb(evidence.clone())).unwrap();
        let scaled = build(lambda).predict(&emb(scale(&claim, lambda)), &emb(scale(&evidence, lambda))).unwrap();
        for (l, d) in &base.distances {
            prop_assert!((scaled.distances[l] - lambda * d).abs() <= 1e-9 * (1.0 + lambda * d));
        }
        let mut sorted: Vec<f64> = base.distances.values().copied().collect();
        sorted.sort_by(f64::total_cmp);
        if sorted.len() < 2 || sorted[1] - sorted[0] > 1e-9 * (1.0 + sorted[1]) {
            prop_assert_eq!(base.label, scaled.label);
        }
    }

    #[test]
    fn zero_distance_query_returns_its_class(samples in labelled_samples(), pick in any::<prop::sample::Index>()) {
        let diffs: Vec<(String, DiffVector)> = samples
            .into_iter()
            .map(|(l, v)| (format!("L{l}"), DiffVector::new(v).unwrap()))
            .collect();
        let model = fit(diffs.iter().map(|(l, d)| (l.as_str(), d))).unwrap();
        let rep = &model.representatives()[pick.index(model.representatives().len())];
        let query = DiffVector::new(rep.mean().to_vec()).unwrap();
        let p = model.predict_diff(&query).unwrap();
        prop_assert_eq!(p.distances[rep.label()], 0.0);
        // Another class can only win if its mean coincides and sorts first.
        if p.label != rep.label() {
            prop_assert_eq!(p.distances[&p.label], 0.0);
            prop_assert!(p.label.as_str() < rep.label());
        }
    }

    #[test]
    fn aggregate_is_permutation_invariant(runs in prop::collection::vec(run_metrics(), 1..12), seed in any::<u64>()) {
        let mut shuffled = runs.clone();
        rng::Pcg32::new(seed).partial_shuffle(&mut shuffled, usize::MAX);
        let a = aggregate(&runs).unwrap();
        let b = aggregate(&shuffled).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.std.accuracy >= 0.0);
        prop_assert!(a.std.f1_per_class.values().all(|&s| s >= 0.0));
    }

    #[test]
    fn metrics_are_bounded_and_relabel_equivariant(
        pairs in prop::collection::vec((0usize..3, 0usize..3), 1..200),
    ) {
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        // Bijection a->z, b->x, c->y.
        let renamed: Vec<String> = ["z", "x", "y"].iter().map(|s| s.to_string()).collect();
        let golds: Vec<&str> = pairs.iter().map(|p| labels[p.0].as_str()).collect();
        let preds: Vec<&str> = pairs.iter().map(|p| labels[p.1].as_str()).collect();
        let golds2: Vec<&str> = pairs.iter().map(|p| renamed[p.0].as_str()).collect();
        let preds2: Vec<&str> = pairs.iter().map(|p| renamed[p.1].as_str()).collect();
        let cm = confusion(&golds, &preds, &labels).unwrap();
        let mut sorted_renamed = renamed.clone();
        sorted_renamed.sort();
        let cm2 = confusion(&golds2, &preds2, &sorted_renamed).unwrap();
        let acc = accuracy(&cm).unwrap();
        prop_assert!((0.0..=1.0).contains(&acc));
        prop_assert_eq!(acc, accuracy(&cm2).unwrap());
        let f1 = classwise_f1(&cm).unwrap();
        let f2 = classwise_f1(&cm2).unwrap();
        for (i, l) in labels.iter().enumerate() {
            prop_assert!((0.0..=1.0).contains(&f1[l]));
            prop_assert!((f1[l] - f2[&renamed[i]]).abs() < 1e-15);
        }
    }

    #[test]
    fn binary_accuracy_is_tp_plus_tn(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..200)) {
        let labels = vec!["neg".to_string(), "pos".to_string()];
        let name = |b: bool| if b { "pos" } else { "neg" };
        let golds: Vec<&str> = pairs.iter().map(|p| name(p.0)).collect();
        let preds: Vec<&str> = pairs.iter().map(|p| name(p.1)).collect();
        let tp = pairs.iter().filter(|p| p.0 && p.1).count();
        let tn = pairs.iter().filter(|p| !p.0 && !p.1).count();
        let acc = accuracy(&confusion(&golds, &preds, &labels).unwrap()).unwrap();
        prop_assert_eq!(acc, (tp + tn) as f64 / pairs.len() as f64);
    }

    #[test]
    fn model_json_round_trips(samples in labelled_samples()) {
        let diffs: Vec<(String, DiffVector)> = samples
            .into_iter()
            .map(|(l, v)| (format!("L{l}"), DiffVector::new(v.iter().map(|x| x / 7.0).collect()).unwrap()))
            .collect();
        let model = fit(diffs.iter().map(|(l, d)| (l.as_str(), d))).unwrap();
        let back = dataset::model_from_json(&dataset::model_to_json(&model)).unwrap();
        prop_assert_eq!(back, model);
    }
}
