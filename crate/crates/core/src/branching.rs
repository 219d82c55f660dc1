//! Degree-based branching: leaf distributions built by walking from the root
//! outward, branching at each vertex in proportion to the weights of its
//! children.
//!
//! Three vertex weightings are provided — unit weights, weighted in-degree
//! (the subtree leaf count, built leaf-to-root with leaves starting at 1) and
//! cumulative in-degree (the number of descendants) — plus power and
//! exponential sharpening of any weighting. The induced leaf distribution is
//! the closed-form product of successive branching probabilities, equivalent
//! to the destination proportions of infinitely many weighted random walks.

use crate::error::{Error, Result};
use crate::inference::LeafDistribution;
use crate::scalar::Scalar;
use crate::tree::{Tree, VertexId};
use serde::{Deserialize, Serialize};

/// Per-vertex branching weights, dense by vertex id.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexWeightMap<S> {
    weights: Vec<S>,
}

impl<S: Scalar> VertexWeightMap<S> {
    pub fn from_values(weights: Vec<S>) -> Self {
        VertexWeightMap { weights }
    }

    pub fn weight(&self, v: VertexId) -> Option<&S> {
        self.weights.get(v.index())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (VertexId, &S)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| (VertexId(i as u32), w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SharpenKind {
    /// `w ↦ w^alpha`
    Power,
    /// `w ↦ exp(alpha·w)`
    Exponential,
}

/// Monotone reweighting that strengthens the preference for heavy branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpenSpec {
    pub kind: SharpenKind,
    pub alpha: f64,
}

impl SharpenSpec {
    pub fn power(alpha: f64) -> Self {
        SharpenSpec {
            kind: SharpenKind::Power,
            alpha,
        }
    }

    pub fn exponential(alpha: f64) -> Self {
        SharpenSpec {
            kind: SharpenKind::Exponential,
            alpha,
        }
    }
}

/// Weight 1 for every vertex.
pub fn unit_weights<S: Scalar>(tree: &Tree) -> VertexWeightMap<S> {
    VertexWeightMap {
        weights: vec![S::one(); tree.vertex_count()],
    }
}

/// Subtree leaf count per vertex: leaves start at 1, each deep vertex sums
/// the values of its direct children (computed leaf-to-root).
pub fn weighted_in_degree<S: Scalar>(tree: &Tree) -> VertexWeightMap<S> {
    let n = tree.vertex_count();
    let mut counts = vec![0u64; n];
    for i in (0..n).rev() {
        let children = tree.children(VertexId(i as u32)).unwrap();
        counts[i] = if children.is_empty() {
            1
        } else {
            children.iter().map(|c| counts[c.index()]).sum()
        };
    }
    VertexWeightMap {
        weights: counts.into_iter().map(S::from_count).collect(),
    }
}

/// Number of vertices strictly below each vertex. Leaves carry 0; for
/// branching purposes a zero-weight leaf competes with weight 1 (see
/// [`branch_leaf_distribution`]).
pub fn cumulative_in_degree<S: Scalar>(tree: &Tree) -> VertexWeightMap<S> {
    let n = tree.vertex_count();
    let mut counts = vec![0u64; n];
    for i in (0..n).rev() {
        let children = tree.children(VertexId(i as u32)).unwrap();
        counts[i] = children
            .iter()
            .map(|c| 1 + counts[c.index()])
            .sum();
    }
    VertexWeightMap {
        weights: counts.into_iter().map(S::from_count).collect(),
    }
}

/// Applies power (`w^alpha`) or exponential (`exp(alpha·w)`) sharpening to
/// every weight.
pub fn sharpen<S: Scalar>(weights: &VertexWeightMap<S>, spec: SharpenSpec) -> VertexWeightMap<S> {
    let weights = weights
        .weights
        .iter()
        .map(|w| match spec.kind {
            SharpenKind::Power => w.clone().pow_sharpen(spec.alpha),
            SharpenKind::Exponential => w.clone().exp_sharpen(spec.alpha),
        })
        .collect();
    VertexWeightMap { weights }
}

/// Leaf distribution induced by branching from the root: a leaf's probability
/// is the product, along the root-to-leaf path, of its ancestors' relative
/// weights among their siblings.
///
/// A leaf that competes as a sibling with zero weight is given weight 1 (its
/// own weight never propagates further, and the zero arises only from weight
/// statistics that count descendants). A branch vertex whose children all
/// have zero effective weight is an error.
pub fn branch_leaf_distribution<S: Scalar>(
    tree: &Tree,
    weights: &VertexWeightMap<S>,
) -> Result<LeafDistribution<S>> {
    let n = tree.vertex_count();
    let effective = |v: VertexId| -> S {
        let w = weights.weight(v).cloned().unwrap_or_else(S::zero);
        if tree.is_leaf(v) && w == S::zero() {
            S::one()
        } else {
            w
        }
    };

    // Probability mass flowing into each vertex; ids are topologically
    // ordered so a single forward pass suffices.
    let mut mass = vec![S::zero(); n];
    mass[0] = S::one();
    let mut entries = Vec::with_capacity(tree.leaf_set().len());
    for i in 0..n {
        let v = VertexId(i as u32);
        let children = tree.children(v).unwrap();
        if children.is_empty() {
            entries.push((v, mass[i].clone()));
            continue;
        }
        let total = children
            .iter()
            .fold(S::zero(), |acc, &c| acc + effective(c));
        if total <= S::zero() {
            return Err(Error::ZeroWeightBranch(v));
        }
        for &c in children {
            mass[c.index()] = mass[i].clone() * effective(c) / total.clone();
        }
    }
    entries.sort_by_key(|(l, _)| *l);
    Ok(LeafDistribution::from_weights(entries).expect("branch mass sums to 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::reference_tree;
    use num_rational::BigRational;

    fn rational(num: u64, den: u64) -> BigRational {
        BigRational::from_ratio(num, den)
    }

    /// Asserts that the distribution equals `ratios / Σ ratios` exactly.
    fn assert_ratios(dist: &LeafDistribution<BigRational>, ratios: &[(u32, u64)]) {
        let total: u64 = ratios.iter().map(|(_, r)| r).sum();
        assert_eq!(dist.len(), ratios.len());
        for (leaf, r) in ratios {
            assert_eq!(
                *dist.probability(VertexId(*leaf)).unwrap(),
                rational(*r, total),
                "leaf {leaf}"
            );
        }
    }

    #[test]
    fn unit_weights_are_all_one() {
        let tree = reference_tree();
        let w = unit_weights::<BigRational>(&tree);
        assert_eq!(w.len(), tree.vertex_count());
        for (_, value) in w.iter() {
            assert_eq!(*value, BigRational::from_count(1));
        }
    }

    #[test]
    fn weighted_in_degree_values() {
        let tree = reference_tree();
        let w = weighted_in_degree::<BigRational>(&tree);
        let expected = [(0, 5), (1, 1), (2, 3), (3, 1), (5, 2), (6, 1), (7, 1)];
        for (v, c) in expected {
            assert_eq!(*w.weight(VertexId(v)).unwrap(), BigRational::from_count(c));
        }
        for leaf in tree.leaves() {
            assert_eq!(*w.weight(leaf).unwrap(), BigRational::from_count(1));
        }
    }

    #[test]
    fn cumulative_in_degree_values() {
        let tree = reference_tree();
        let w = cumulative_in_degree::<BigRational>(&tree);
        let expected = [(0, 11), (1, 1), (2, 5), (3, 2), (5, 2), (6, 1), (7, 1)];
        for (v, c) in expected {
            assert_eq!(*w.weight(VertexId(v)).unwrap(), BigRational::from_count(c));
        }
        for leaf in tree.leaves() {
            assert_eq!(*w.weight(leaf).unwrap(), BigRational::from_count(0));
        }
    }

    #[test]
    fn root_only_statistics() {
        let tree = Tree::new();
        assert_eq!(
            *unit_weights::<BigRational>(&tree).weight(VertexId(0)).unwrap(),
            BigRational::from_count(1)
        );
        assert_eq!(
            *weighted_in_degree::<BigRational>(&tree)
                .weight(VertexId(0))
                .unwrap(),
            BigRational::from_count(1)
        );
        assert_eq!(
            *cumulative_in_degree::<BigRational>(&tree)
                .weight(VertexId(0))
                .unwrap(),
            BigRational::from_count(0)
        );
    }

    #[test]
    fn squared_in_degree_weights() {
        let tree = reference_tree();
        let w = sharpen(&weighted_in_degree::<BigRational>(&tree), SharpenSpec::power(2.0));
        assert_eq!(*w.weight(VertexId(2)).unwrap(), BigRational::from_count(9));
        assert_eq!(*w.weight(VertexId(5)).unwrap(), BigRational::from_count(4));
        assert_eq!(*w.weight(VertexId(1)).unwrap(), BigRational::from_count(1));
    }

    #[test]
    fn squared_cumulative_weights() {
        let tree = reference_tree();
        let w = sharpen(
            &cumulative_in_degree::<BigRational>(&tree),
            SharpenSpec::power(2.0),
        );
        assert_eq!(*w.weight(VertexId(2)).unwrap(), BigRational::from_count(25));
        assert_eq!(*w.weight(VertexId(3)).unwrap(), BigRational::from_count(4));
        assert_eq!(*w.weight(VertexId(5)).unwrap(), BigRational::from_count(4));
    }

    #[test]
    fn power_zero_flattens_everything() {
        let tree = reference_tree();
        let w = sharpen(&cumulative_in_degree::<BigRational>(&tree), SharpenSpec::power(0.0));
        for (_, value) in w.iter() {
            assert_eq!(*value, BigRational::from_count(1));
        }
    }

    #[test]
    fn power_one_is_identity() {
        let tree = reference_tree();
        let w = weighted_in_degree::<BigRational>(&tree);
        assert_eq!(sharpen(&w, SharpenSpec::power(1.0)), w);
    }

    #[test]
    fn unit_weight_branching_ratios() {
        let tree = reference_tree();
        let dist = branch_leaf_distribution(&tree, &unit_weights::<BigRational>(&tree)).unwrap();
        assert_ratios(&dist, &[(4, 4), (8, 1), (9, 1), (10, 2), (11, 4)]);
    }

    #[test]
    fn weighted_in_degree_branching_inverts_to_uniform() {
        let tree = reference_tree();
        let dist =
            branch_leaf_distribution(&tree, &weighted_in_degree::<BigRational>(&tree)).unwrap();
        assert_ratios(&dist, &[(4, 1), (8, 1), (9, 1), (10, 1), (11, 1)]);
    }

    #[test]
    fn squared_in_degree_branching_ratios() {
        let tree = reference_tree();
        let w = sharpen(&weighted_in_degree::<BigRational>(&tree), SharpenSpec::power(2.0));
        let dist = branch_leaf_distribution(&tree, &w).unwrap();
        assert_ratios(&dist, &[(4, 5), (8, 18), (9, 18), (10, 9), (11, 5)]);
    }

    #[test]
    fn cumulative_branching_ratios() {
        let tree = reference_tree();
        let dist =
            branch_leaf_distribution(&tree, &cumulative_in_degree::<BigRational>(&tree)).unwrap();
        assert_ratios(&dist, &[(4, 3), (8, 5), (9, 5), (10, 5), (11, 6)]);
    }

    #[test]
    fn squared_cumulative_branching_ratios() {
        let tree = reference_tree();
        let w = sharpen(
            &cumulative_in_degree::<BigRational>(&tree),
            SharpenSpec::power(2.0),
        );
        let dist = branch_leaf_distribution(&tree, &w).unwrap();
        assert_ratios(&dist, &[(4, 1), (8, 10), (9, 10), (10, 5), (11, 4)]);
    }

    #[test]
    fn zero_weight_branch_is_rejected() {
        let tree = reference_tree();
        let mut values = vec![BigRational::from_count(1); tree.vertex_count()];
        // Vertex 5 is deep (children 8 and 9 are leaves with nonzero weight
        // here), so zeroing 5 and its sibling 6 starves branch vertex 2.
        values[5] = BigRational::from_count(0);
        values[6] = BigRational::from_count(0);
        let weights = VertexWeightMap::from_values(values);
        assert!(matches!(
            branch_leaf_distribution(&tree, &weights),
            Err(Error::ZeroWeightBranch(VertexId(2)))
        ));
    }

    #[test]
    fn root_only_branching_is_point_mass() {
        let tree = Tree::new();
        let dist = branch_leaf_distribution(&tree, &unit_weights::<f64>(&tree)).unwrap();
        assert_eq!(dist.len(), 1);
        assert_eq!(*dist.probability(VertexId(0)).unwrap(), 1.0);
    }

    #[test]
    fn exponential_sharpening_prefers_heavy_branches() {
        let tree = reference_tree();
        let w = sharpen(&weighted_in_degree::<f64>(&tree), SharpenSpec::exponential(1.0));
        let dist = branch_leaf_distribution(&tree, &w).unwrap();
        // The twice-merging branch outweighs the isolated chains.
        assert!(dist.probability(VertexId(8)).unwrap() > dist.probability(VertexId(4)).unwrap());
        assert!(dist.probability(VertexId(8)).unwrap() > dist.probability(VertexId(11)).unwrap());
        // alpha = 0 degenerates to unit branching.
        let flat = sharpen(&weighted_in_degree::<f64>(&tree), SharpenSpec::exponential(0.0));
        let unit = branch_leaf_distribution(&tree, &unit_weights::<f64>(&tree)).unwrap();
        let flat_dist = branch_leaf_distribution(&tree, &flat).unwrap();
        for ((_, a), (_, b)) in flat_dist.iter().zip(unit.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
