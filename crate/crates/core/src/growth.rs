//! Interval-by-interval growth driver.
//!
//! Each interval draws a Poisson batch size, computes the configured leaf
//! distribution on the pre-batch snapshot, samples that many attachment
//! targets (independently, with replacement) and appends the batch. Batch
//! sizes and target draws come from independently seeded sub-streams derived
//! from (seed, purpose, run index), so the Poisson sequence is identical
//! across policies sharing a seed, and ensemble runs are reproducible
//! regardless of scheduling.

use crate::branching::{
    branch_leaf_distribution, cumulative_in_degree, sharpen, unit_weights, weighted_in_degree,
    SharpenSpec, VertexWeightMap,
};
use crate::error::{Error, Result};
use crate::inference::{
    global_likelihood, local_likelihood, mixture, oscillating_q, posterior, LeafDistribution,
    OscillatingQ,
};
use crate::scalar::Scalar;
use crate::tree::{TimeIndex, Tree, VertexId};
use rand::distr::Distribution;
use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Vertex weighting used by the branch policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchWeighting {
    Unit,
    #[serde(rename = "indeg")]
    WeightedInDegree,
    #[serde(rename = "cumindeg")]
    CumulativeInDegree,
}

impl fmt::Display for BranchWeighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchWeighting::Unit => write!(f, "unit"),
            BranchWeighting::WeightedInDegree => write!(f, "indeg"),
            BranchWeighting::CumulativeInDegree => write!(f, "cumindeg"),
        }
    }
}

/// Which leaf distribution drives attachment sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// The prior itself.
    Bayes0,
    /// Posterior under the global (weighted-path-length) likelihood.
    Bayes1,
    /// Posterior under the local (weight-product) likelihood.
    Bayes2,
    /// Degree-based branching distribution.
    Branch {
        weighting: BranchWeighting,
        sharpening: Option<SharpenSpec>,
    },
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Bayes0 => write!(f, "bayes0"),
            Policy::Bayes1 => write!(f, "bayes1"),
            Policy::Bayes2 => write!(f, "bayes2"),
            Policy::Branch {
                weighting,
                sharpening: None,
            } => write!(f, "branch-{weighting}"),
            Policy::Branch {
                weighting,
                sharpening: Some(spec),
            } => {
                let kind = match spec.kind {
                    crate::branching::SharpenKind::Power => "pow",
                    crate::branching::SharpenKind::Exponential => "exp",
                };
                write!(f, "branch-{weighting}-{kind}{}", spec.alpha)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prior {
    Uniform,
}

/// Mixture weight schedule for blending prior and posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MixtureSchedule {
    Constant(f64),
    Oscillating(OscillatingQ),
}

impl MixtureSchedule {
    pub fn at(&self, t: TimeIndex) -> Result<f64> {
        match self {
            MixtureSchedule::Constant(q) => Ok(*q),
            MixtureSchedule::Oscillating(params) => oscillating_q(t, params),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthConfig {
    /// Number of time intervals, including the root's interval 0.
    pub intervals: u32,
    /// Mean of the per-interval Poisson batch size (constant over intervals).
    pub poisson_mean: f64,
    pub policy: Policy,
    /// Mixture weight between prior (q = 1) and posterior (q = 0).
    pub q: MixtureSchedule,
    pub prior: Prior,
    pub seed: u64,
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.intervals < 1 {
            return Err(Error::InvalidConfig("intervals must be at least 1".into()));
        }
        if !self.poisson_mean.is_finite() || self.poisson_mean < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "poisson mean must be finite and non-negative, got {}",
                self.poisson_mean
            )));
        }
        match &self.q {
            MixtureSchedule::Constant(q) => {
                if !(0.0..=1.0).contains(q) {
                    return Err(Error::InvalidConfig(format!(
                        "q must lie in [0, 1], got {q}"
                    )));
                }
            }
            MixtureSchedule::Oscillating(params) => params.validate()?,
        }
        if let Policy::Branch {
            sharpening: Some(spec),
            ..
        } = &self.policy
        {
            if !spec.alpha.is_finite() || spec.alpha < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "alpha must be finite and non-negative, got {}",
                    spec.alpha
                )));
            }
        }
        Ok(())
    }
}

const BATCH_STREAM: u64 = 1;
const TARGET_STREAM: u64 = 2;

/// Deterministic sub-stream keyed by (seed, purpose, run index).
fn substream(seed: u64, purpose: u64, run_index: u64) -> ChaCha8Rng {
    debug_assert!(run_index < 1 << 48);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 48) | run_index);
    rng
}

/// One Poisson draw; a zero mean always yields zero.
pub fn draw_batch_size<R: Rng + ?Sized>(rng: &mut R, mu: f64) -> u64 {
    assert!(mu.is_finite() && mu >= 0.0, "invalid poisson mean {mu}");
    if mu == 0.0 {
        return 0;
    }
    let poisson = Poisson::new(mu).expect("positive finite mean");
    poisson.sample(rng) as u64
}

/// The sampling distribution the configured policy induces on the current
/// snapshot. A history-free snapshot (root only) falls back to the prior for
/// every policy.
pub fn policy_distribution<S: Scalar>(
    tree: &Tree,
    config: &GrowthConfig,
    t: TimeIndex,
) -> Result<LeafDistribution<S>> {
    let prior: LeafDistribution<S> = match config.prior {
        Prior::Uniform => LeafDistribution::uniform(tree.leaves()),
    };
    if tree.vertex_count() == 1 {
        return Ok(prior);
    }
    match &config.policy {
        Policy::Bayes0 => Ok(prior),
        Policy::Bayes1 | Policy::Bayes2 => {
            let weights = tree.attachment_weights();
            let likelihood = if matches!(config.policy, Policy::Bayes1) {
                global_likelihood::<S>(tree, &weights)
            } else {
                local_likelihood::<S>(tree, &weights)
            };
            let post = posterior(&prior, &likelihood)?;
            let q = config.q.at(t)?;
            if q == 0.0 {
                Ok(post)
            } else {
                mixture(&prior, &post, S::from_f64(q))
            }
        }
        Policy::Branch {
            weighting,
            sharpening,
        } => {
            let weights: VertexWeightMap<S> = match weighting {
                BranchWeighting::Unit => unit_weights(tree),
                BranchWeighting::WeightedInDegree => weighted_in_degree(tree),
                BranchWeighting::CumulativeInDegree => cumulative_in_degree(tree),
            };
            let weights = match sharpening {
                Some(spec) => sharpen(&weights, *spec),
                None => weights,
            };
            branch_leaf_distribution(tree, &weights)
        }
    }
}

/// `n` independent draws with replacement from the leaf distribution.
pub fn sample_targets<R: Rng + ?Sized>(
    rng: &mut R,
    dist: &LeafDistribution<f64>,
    n: usize,
) -> Vec<VertexId> {
    if n == 0 {
        return Vec::new();
    }
    let leaves: Vec<VertexId> = dist.leaves().collect();
    let index = WeightedIndex::new(dist.iter().map(|(_, p)| *p))
        .expect("leaf distribution has positive finite mass");
    (0..n).map(|_| leaves[index.sample(rng)]).collect()
}

/// What happened in one growth interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub t: TimeIndex,
    /// Attachments issued this interval as (child, parent), in creation
    /// order. Parents are leaves of the pre-batch snapshot.
    pub attachments: Vec<(VertexId, VertexId)>,
    /// The sampling distribution used for this interval's targets (over the
    /// pre-batch leaf set).
    pub distribution: LeafDistribution<f64>,
    /// Vertex count after the batch settled.
    pub vertex_count: u32,
    /// Leaf count after the batch settled.
    pub leaf_count: u32,
}

impl FrameRecord {
    pub fn new_vertex_ids(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.attachments.iter().map(|(child, _)| *child)
    }

    pub fn batch_size(&self) -> usize {
        self.attachments.len()
    }
}

/// A full growth run: configuration echo, one record per interval, the final
/// policy distribution on the finished tree, and the tree itself. Replaying
/// the recorded attachments reconstructs the tree exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub config: GrowthConfig,
    pub frames: Vec<FrameRecord>,
    pub final_distribution: LeafDistribution<f64>,
    pub tree: Tree,
}

impl Trajectory {
    pub fn batch_sizes(&self) -> Vec<usize> {
        self.frames.iter().map(FrameRecord::batch_size).collect()
    }
}

/// Runs the growth process under sub-stream index 0.
pub fn run(config: &GrowthConfig) -> Result<Trajectory> {
    run_indexed(config, 0)
}

/// Runs the growth process with per-run sub-streams derived from
/// (seed, run index); ensembles use consecutive indices.
pub fn run_indexed(config: &GrowthConfig, run_index: u64) -> Result<Trajectory> {
    config.validate()?;
    let mut batch_rng = substream(config.seed, BATCH_STREAM, run_index);
    let mut target_rng = substream(config.seed, TARGET_STREAM, run_index);

    let mut tree = Tree::new();
    let mut frames = Vec::with_capacity(config.intervals.saturating_sub(1) as usize);
    for t in 1..config.intervals {
        let t = TimeIndex(t);
        let n = draw_batch_size(&mut batch_rng, config.poisson_mean) as usize;
        let distribution = policy_distribution::<f64>(&tree, config, t)?;
        let targets = sample_targets(&mut target_rng, &distribution, n);
        let new_ids = tree.append_batch(t, &targets)?;
        frames.push(FrameRecord {
            t,
            attachments: new_ids.into_iter().zip(targets).collect(),
            distribution,
            vertex_count: tree.vertex_count() as u32,
            leaf_count: tree.leaf_set().len() as u32,
        });
    }
    let final_distribution =
        policy_distribution::<f64>(&tree, config, TimeIndex(config.intervals))?;
    Ok(Trajectory {
        config: config.clone(),
        frames,
        final_distribution,
        tree,
    })
}
