//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `cargo test --test acceptance -- --nocapture` to see
//! them). Tolerances and runtime budgets are pinned in the assertions.

mod common;

use common::*;
use leafgrow::analysis::ensemble;
use leafgrow::branching::{
    branch_leaf_distribution, cumulative_in_degree, sharpen, unit_weights, weighted_in_degree,
    SharpenSpec,
};
use leafgrow::export::{export_frames, export_trajectory_json};
use leafgrow::growth::{run, Policy};
use leafgrow::inference::{global_likelihood, local_likelihood};
use leafgrow::scalar::Scalar;
use leafgrow::tree::VertexId;
use leafgrow::BigRational;
use std::time::Instant;

fn pass(number: u32, name: &str) {
    println!("criterion {number:02} ({name}): PASS");
}

#[test]
fn criterion_01_reference_attachment_weights() {
    let tree = reference_tree();
    let started = Instant::now();
    let weights = tree.attachment_weights();
    let elapsed = started.elapsed();
    assert_eq!(weights.get(VertexId(2), VertexId(0)), Some(3));
    assert_eq!(weights.get(VertexId(5), VertexId(2)), Some(2));
    let mut ones = 0;
    for (child, _, w) in weights.iter() {
        if child == VertexId(2) || child == VertexId(5) {
            continue;
        }
        assert_eq!(w, 1);
        ones += 1;
    }
    assert_eq!(ones, 9);
    assert!(
        elapsed.as_micros() < 1000,
        "attachment weights took {elapsed:?}, budget 1 ms"
    );
    pass(1, "reference attachment weights");
}

#[test]
fn criterion_02_global_likelihood_values() {
    let tree = reference_tree();
    let weights = tree.attachment_weights();
    let global = global_likelihood::<BigRational>(&tree, &weights);
    let expected = [(4u32, 2u64), (8, 6), (9, 6), (10, 5), (11, 3)];
    for (leaf, value) in expected {
        assert_eq!(
            *global.value(VertexId(leaf)).unwrap(),
            BigRational::from_count(value)
        );
    }
    pass(2, "global likelihood values");
}

#[test]
fn criterion_03_local_likelihood_values() {
    let tree = reference_tree();
    let weights = tree.attachment_weights();
    let local = local_likelihood::<BigRational>(&tree, &weights);
    let expected = [(4u32, 1u64), (8, 6), (9, 6), (10, 3), (11, 1)];
    for (leaf, value) in expected {
        assert_eq!(
            *local.value(VertexId(leaf)).unwrap(),
            BigRational::from_count(value)
        );
    }
    pass(3, "local likelihood values");
}

#[test]
fn criterion_04_branching_reproductions() {
    let tree = reference_tree();
    let cases: [(&str, leafgrow::ExactVertexWeightMap, [u64; 5]); 5] = [
        ("unit", unit_weights(&tree), [4, 1, 1, 2, 4]),
        ("in-degree", weighted_in_degree(&tree), [1, 1, 1, 1, 1]),
        (
            "in-degree squared",
            sharpen(&weighted_in_degree(&tree), SharpenSpec::power(2.0)),
            [5, 18, 18, 9, 5],
        ),
        (
            "cumulative in-degree",
            cumulative_in_degree(&tree),
            [3, 5, 5, 5, 6],
        ),
        (
            "cumulative in-degree squared",
            sharpen(&cumulative_in_degree(&tree), SharpenSpec::power(2.0)),
            [1, 10, 10, 5, 4],
        ),
    ];
    let leaves = [4u32, 8, 9, 10, 11];
    for (name, weights, ratios) in cases {
        let dist = branch_leaf_distribution(&tree, &weights).unwrap();
        let total: u64 = ratios.iter().sum();
        for (leaf, ratio) in leaves.iter().zip(ratios) {
            assert_eq!(
                *dist.probability(VertexId(*leaf)).unwrap(),
                BigRational::from_ratio(ratio, total),
                "{name}: leaf {leaf}"
            );
        }
    }
    pass(4, "branching reproductions in exact arithmetic");
}

#[test]
fn criterion_05_inversion_property_suite() {
    let started = Instant::now();
    let corpus = corpus();
    assert_eq!(corpus.len(), 200);
    for traj in &corpus {
        let tree = &traj.tree;
        let n = tree.leaf_set().len() as u64;
        let exact = branch_leaf_distribution(tree, &weighted_in_degree::<BigRational>(tree))
            .unwrap();
        for (_, p) in exact.iter() {
            assert_eq!(*p, BigRational::from_ratio(1, n));
        }
        let float = branch_leaf_distribution(tree, &weighted_in_degree::<f64>(tree)).unwrap();
        for (_, p) in float.iter() {
            assert!((p - 1.0 / n as f64).abs() < 1e-12);
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, budget 10 s");
    pass(5, "inversion property on 200 random trees");
}

#[test]
fn criterion_06_oracle_equivalence() {
    let started = Instant::now();
    let corpus = corpus();
    assert_eq!(corpus.len(), 200);
    for traj in &corpus {
        let tree = &traj.tree;
        let weights = tree.attachment_weights();
        let counts = enumerate_edge_counts(tree);
        assert_eq!(weights.len(), counts.len());
        for (child, parent, w) in weights.iter() {
            assert_eq!(counts[&(child, parent)], w);
        }
        let global = global_likelihood::<f64>(tree, &weights);
        for (leaf, sum) in enumerate_path_sums(tree) {
            assert_eq!(*global.value(leaf).unwrap(), sum as f64);
        }
        let local = local_likelihood::<f64>(tree, &weights);
        for (leaf, product) in enumerate_path_products(tree) {
            let expected: f64 = product.to_string().parse().unwrap();
            let got = local.value(leaf).unwrap().exp();
            assert!(
                (got - expected).abs() <= 1e-9 * expected,
                "leaf {leaf}: {got} vs {expected}"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget 30 s");
    pass(6, "oracle equivalence on 200 random trees");
}

#[test]
fn criterion_07_determinism_and_shared_poisson_sequence() {
    let mut batch_sequences = Vec::new();
    for policy in [Policy::Bayes0, Policy::Bayes1, Policy::Bayes2] {
        let cfg = config(policy, 25, 20260810);
        let first = run(&cfg).unwrap();
        let second = run(&cfg).unwrap();
        let json_first = export_trajectory_json(&first);
        let json_second = export_trajectory_json(&second);
        assert_eq!(json_first, json_second, "{policy:?} serialization differs");
        batch_sequences.push(first.batch_sizes());
    }
    assert_eq!(batch_sequences[0], batch_sequences[1]);
    assert_eq!(batch_sequences[0], batch_sequences[2]);
    pass(7, "byte-identical reruns and policy-independent batch sizes");
}

#[test]
fn criterion_08_sampling_distributions_normalized_and_positive() {
    for policy in [Policy::Bayes0, Policy::Bayes1, Policy::Bayes2] {
        let cfg = config(policy, 25, 20260810);
        let traj = run(&cfg).unwrap();
        let distributions = traj
            .frames
            .iter()
            .map(|f| &f.distribution)
            .chain(std::iter::once(&traj.final_distribution));
        for dist in distributions {
            let total: f64 = dist.iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-12, "{policy:?}: sum {total}");
            for (leaf, p) in dist.iter() {
                assert!(*p > 0.0, "{policy:?}: leaf {leaf} has p {p}");
            }
        }
    }
    pass(8, "sampling distributions sum to 1 and stay positive");
}

#[test]
fn criterion_09_directional_path_density() {
    let started = Instant::now();
    let runs = 200;
    let bayes0 = ensemble(&config(Policy::Bayes0, 25, 0), runs).unwrap();
    let bayes2 = ensemble(&config(Policy::Bayes2, 25, 0), runs).unwrap();
    let g0 = &bayes0.groups[0];
    let g2 = &bayes2.groups[0];
    assert!(
        g0.median_attachment_count < g2.median_attachment_count,
        "highlighted-path density: bayes0 median {} vs bayes2 median {}",
        g0.median_attachment_count,
        g2.median_attachment_count
    );
    assert!(
        g2.median_attachment_length <= g0.median_attachment_length,
        "attachment length: bayes2 median {} vs bayes0 median {}",
        g2.median_attachment_length,
        g0.median_attachment_length
    );
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}, budget 2 min");
    pass(9, "directional path density over 200-run ensembles");
}

#[test]
fn criterion_10_frame_emission() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(Policy::Bayes0, 10, 7);
    let traj = run(&cfg).unwrap();
    let manifest = export_frames(&traj, dir.path()).unwrap();
    assert_eq!(manifest.files.len(), 12, "10 growth + complete + path");
    let mut names: Vec<&str> = manifest.files.iter().map(|f| f.name.as_str()).collect();
    names.sort_unstable();
    assert_eq!(names[10], "frame_0010_complete.dat");
    assert_eq!(names[11], "frame_0011_path.dat");
    for entry in &manifest.files {
        let contents = std::fs::read_to_string(dir.path().join(&entry.name)).unwrap();
        let mut leaf_mass = 0.0f64;
        for line in contents.lines().skip(1) {
            let cols: Vec<&str> = line.split_whitespace().collect();
            let is_leaf: u8 = cols[3].parse().unwrap();
            let p: f64 = cols[4].parse().unwrap();
            if is_leaf == 1 {
                leaf_mass += p;
            } else {
                assert_eq!(p, -1.0, "{}: non-leaf row carries a probability", entry.name);
            }
        }
        assert!(
            (leaf_mass - 1.0).abs() < 1e-9,
            "{}: leaf probabilities sum to {leaf_mass}",
            entry.name
        );
    }
    pass(10, "frame inventory and per-frame probability mass");
}
