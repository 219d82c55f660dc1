//! Growth of time-ordered rooted random trees by probabilistic leaf
//! attachment.
//!
//! A tree grows interval by interval: a Poisson-sized batch of new vertices
//! arrives, each picks a leaf of the current snapshot from a probability
//! distribution and attaches to it. This crate owns the tree structure, the
//! construction of that leaf distribution — either by Bayesian inference over
//! leaf-to-root paths (a prior over leaves updated with a path-based
//! likelihood) or by degree-based branching from the root — plus the seeded
//! growth driver, ensemble diagnostics, and all serialization.
//!
//! The probability arithmetic is generic over [`Scalar`]: `f64`/`f32` for
//! simulation and [`BigRational`] where exact ratios matter. Concrete aliases
//! for the common instantiations live at the crate root.

pub mod analysis;
pub mod branching;
pub mod error;
pub mod export;
#[cfg(test)]
mod fixtures;
pub mod growth;
pub mod inference;
pub mod scalar;
pub mod tree;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use tree::{EdgeWeightMap, Path, TimeIndex, Tree, Vertex, VertexId};

pub use num_rational::BigRational;

/// Leaf distribution in simulation arithmetic.
pub type LeafDistribution64 = inference::LeafDistribution<f64>;
/// Likelihood vector in simulation arithmetic (log-space products).
pub type LikelihoodVector64 = inference::LikelihoodVector<f64>;
/// Vertex weight map in simulation arithmetic.
pub type VertexWeightMap64 = branching::VertexWeightMap<f64>;

/// Leaf distribution in exact rational arithmetic.
pub type ExactLeafDistribution = inference::LeafDistribution<BigRational>;
/// Likelihood vector in exact rational arithmetic (linear products).
pub type ExactLikelihoodVector = inference::LikelihoodVector<BigRational>;
/// Vertex weight map in exact rational arithmetic.
pub type ExactVertexWeightMap = branching::VertexWeightMap<BigRational>;
