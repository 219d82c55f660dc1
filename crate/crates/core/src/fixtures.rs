//! Shared unit-test fixtures.

use crate::tree::{TimeIndex, Tree, VertexId};

/// The small reference tree used throughout the unit tests.
///
/// Three branches off the root (vertex 0): a short chain ending in leaf 4, a
/// branch that merges twice (deep vertices 2, 5, 6 with leaves 8, 9, 10), and
/// a longer isolated chain ending in leaf 11.
///
/// ```text
///   0 ← 1 ← 4
///   0 ← 2 ← 5 ← 8
///            5 ← 9
///        2 ← 6 ← 10
///   0 ← 3 ← 7 ← 11
/// ```
///
/// Leaf set: {4, 8, 9, 10, 11}. Attachment weights: 2→0 carries 3, 5→2
/// carries 2, all others carry 1.
pub(crate) fn reference_tree() -> Tree {
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
