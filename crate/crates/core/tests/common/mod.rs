//! Shared fixtures and brute-force oracles for the integration tests.
//!
//! The oracles deliberately avoid the library's aggregation passes: they
//! enumerate every leaf-to-root path explicitly (following raw parent links)
//! and recount from scratch, so they stay independent of the code they check.

#![allow(dead_code)]

use leafgrow::growth::{GrowthConfig, MixtureSchedule, Policy, Prior, Trajectory};
use leafgrow::tree::{TimeIndex, Tree, VertexId};
use num_bigint::BigUint;
use std::collections::HashMap;

/// The small reference tree used for the worked examples: three branches off
/// the root — a short chain (leaf 4), a twice-merging branch (leaves 8, 9,
/// 10) and a longer chain (leaf 11).
pub fn reference_tree() -> Tree {
    let mut tree = Tree::new();
    tree.append_batch(TimeIndex(1), &[VertexId(0); 3]).unwrap();
    tree.append_batch(
        TimeIndex(2),
        &[VertexId(1), VertexId(2), VertexId(2), VertexId(3)],
    )
    .unwrap();
    tree.append_batch(
        TimeIndex(3),
        &[VertexId(5), VertexId(5), VertexId(6), VertexId(7)],
    )
    .unwrap();
    tree
}

/// Per-attachment traversal counts from explicit enumeration of every
/// leaf-to-root path.
pub fn enumerate_edge_counts(tree: &Tree) -> HashMap<(VertexId, VertexId), u64> {
    let mut counts = HashMap::new();
    for leaf in tree.leaves() {
        let mut cur = leaf;
        while let Some(parent) = tree.parent(cur).unwrap() {
            *counts.entry((cur, parent)).or_insert(0) += 1;
            cur = parent;
        }
    }
    counts
}

/// Weighted path length per leaf, recomputed from the enumeration counts.
pub fn enumerate_path_sums(tree: &Tree) -> Vec<(VertexId, u64)> {
    let counts = enumerate_edge_counts(tree);
    tree.leaves()
        .map(|leaf| {
            let mut sum = 0;
            let mut cur = leaf;
            while let Some(parent) = tree.parent(cur).unwrap() {
                sum += counts[&(cur, parent)];
                cur = parent;
            }
            (leaf, sum)
        })
        .collect()
}

/// Exact product of attachment counts per leaf (big integers, no overflow).
pub fn enumerate_path_products(tree: &Tree) -> Vec<(VertexId, BigUint)> {
    let counts = enumerate_edge_counts(tree);
    tree.leaves()
        .map(|leaf| {
            let mut product = BigUint::from(1u32);
            let mut cur = leaf;
            while let Some(parent) = tree.parent(cur).unwrap() {
                product *= BigUint::from(counts[&(cur, parent)]);
                cur = parent;
            }
            (leaf, product)
        })
        .collect()
}

/// Leaves in the subtree rooted at `v`, counted by a plain depth-first walk.
pub fn subtree_leaf_count(tree: &Tree, v: VertexId) -> u64 {
    let mut stack = vec![v];
    let mut count = 0;
    while let Some(x) = stack.pop() {
        let children = tree.children(x).unwrap();
        if children.is_empty() {
            count += 1;
        } else {
            stack.extend_from_slice(children);
        }
    }
    count
}

/// Number of vertices strictly below `v`.
pub fn descendant_count(tree: &Tree, v: VertexId) -> u64 {
    let mut stack: Vec<VertexId> = tree.children(v).unwrap().to_vec();
    let mut count = 0;
    while let Some(x) = stack.pop() {
        count += 1;
        stack.extend_from_slice(tree.children(x).unwrap());
    }
    count
}

pub fn config(policy: Policy, intervals: u32, seed: u64) -> GrowthConfig {
    GrowthConfig {
        intervals,
        poisson_mean: 2.0,
        policy,
        q: MixtureSchedule::Constant(0.0),
        prior: Prior::Uniform,
        seed,
    }
}

/// 200 trees grown at Poisson mean 2 with 3–12 intervals, seeds 0–199,
/// cycling through the three Bayes policies for shape diversity.
pub fn corpus() -> Vec<Trajectory> {
    (0..200u64)
        .map(|seed| {
            let policy = match seed % 3 {
                0 => Policy::Bayes0,
                1 => Policy::Bayes1,
                _ => Policy::Bayes2,
            };
            let intervals = 3 + (seed % 10) as u32;
            leafgrow::growth::run(&config(policy, intervals, seed)).unwrap()
        })
        .collect()
}
