//! Leaf distributions and path-based likelihood inference.
//!
//! The history of the tree is the set of leaf-to-root paths. Two likelihood
//! readings of that history are supported:
//!
//! * **global** — a leaf's value is the weighted length of its path (the sum
//!   of attachment weights along it);
//! * **local** — a leaf's value is the product of attachment weights along
//!   its path, which follows from chaining pairwise conditionals down the
//!   path.
//!
//! Combining either likelihood with a prior over leaves yields the posterior
//! used to sample attachment targets. Likelihood values are deliberately left
//! unnormalized; normalization happens once, in the posterior.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::{EdgeWeightMap, TimeIndex, Tree, VertexId};

/// How the values of a [`LikelihoodVector`] are stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Linear,
    Log,
}

/// Probability distribution over the current leaf set, in ascending id order.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct LeafDistribution<S> {
    entries: Vec<(VertexId, S)>,
}

impl<S: Scalar> LeafDistribution<S> {
    /// Uniform distribution over the given leaves (ascending id order
    /// expected; the tree's leaf iterator provides it).
    pub fn uniform(leaves: impl IntoIterator<Item = VertexId>) -> Self {
        let leaves: Vec<_> = leaves.into_iter().collect();
        assert!(!leaves.is_empty(), "a leaf distribution cannot be empty");
        let p = S::from_ratio(1, leaves.len() as u64);
        LeafDistribution {
            entries: leaves.into_iter().map(|l| (l, p.clone())).collect(),
        }
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(weights: Vec<(VertexId, S)>) -> Result<Self> {
        let total = weights
            .iter()
            .fold(S::zero(), |acc, (_, w)| acc + w.clone());
        if total <= S::zero() {
            return Err(Error::DegenerateEvidence);
        }
        Ok(LeafDistribution {
            entries: weights
                .into_iter()
                .map(|(l, w)| (l, w / total.clone()))
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (VertexId, &S)> + '_ {
        self.entries.iter().map(|(l, p)| (*l, p))
    }

    pub fn leaves(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.entries.iter().map(|(l, _)| *l)
    }

    pub fn probability(&self, leaf: VertexId) -> Option<&S> {
        self.entries
            .binary_search_by_key(&leaf, |(l, _)| *l)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    /// Leaf of maximum probability; ties break toward the smallest id.
    pub fn argmax(&self) -> VertexId {
        let mut best = &self.entries[0];
        for e in &self.entries[1..] {
            if e.1 > best.1 {
                best = e;
            }
        }
        best.0
    }

    pub fn total(&self) -> S {
        self.entries
            .iter()
            .fold(S::zero(), |acc, (_, p)| acc + p.clone())
    }

    fn same_support(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|((a, _), (b, _))| a == b)
    }
}

/// Unnormalized likelihood values per leaf, in ascending id order.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodVector<S> {
    entries: Vec<(VertexId, S)>,
    repr: Representation,
}

impl<S: Scalar> LikelihoodVector<S> {
    pub fn from_parts(entries: Vec<(VertexId, S)>, repr: Representation) -> Self {
        LikelihoodVector { entries, repr }
    }

    pub fn repr(&self) -> Representation {
        self.repr
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (VertexId, &S)> + '_ {
        self.entries.iter().map(|(l, v)| (*l, v))
    }

    pub fn value(&self, leaf: VertexId) -> Option<&S> {
        self.entries
            .binary_search_by_key(&leaf, |(l, _)| *l)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    /// Converts a log-space vector to linear space, rescaled by the maximum
    /// entry so the exponentials stay in range. The posterior is invariant
    /// under that common scale. Linear vectors pass through unchanged.
    pub fn into_linear(self) -> Self {
        match self.repr {
            Representation::Linear => self,
            Representation::Log => {
                let max = self
                    .entries
                    .iter()
                    .map(|(_, v)| v.clone())
                    .fold(None::<S>, |acc, v| match acc {
                        Some(m) if m >= v => Some(m),
                        _ => Some(v),
                    })
                    .expect("non-empty likelihood vector");
                let entries = self
                    .entries
                    .into_iter()
                    .map(|(l, v)| (l, (v - max.clone()).exp()))
                    .collect();
                LikelihoodVector {
                    entries,
                    repr: Representation::Linear,
                }
            }
        }
    }
}

/// The normalization constant of the posterior: the prior-weighted sum of
/// likelihood values over the leaf set.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence<S> {
    pub value: S,
    pub repr: Representation,
}

/// Weighted path length per leaf: the sum of attachment weights along the
/// leaf-to-root path. For the root-only tree the single entry is (root, 0)
/// and callers fall back to the prior.
pub fn global_likelihood<S: Scalar>(tree: &Tree, weights: &EdgeWeightMap) -> LikelihoodVector<S> {
    let entries = tree
        .leaves()
        .map(|leaf| {
            let mut sum = 0u64;
            let mut cur = leaf;
            while let Some(w) = weights.weight_from(cur) {
                sum += w;
                cur = tree.parent(cur).unwrap().unwrap();
            }
            (leaf, S::from_count(sum))
        })
        .collect();
    LikelihoodVector {
        entries,
        repr: Representation::Linear,
    }
}

/// Product of attachment weights along each leaf-to-root path, carried in log
/// space for floating-point scalars and linearly for exact scalars. The
/// empty product (root-only tree) is 1.
pub fn local_likelihood<S: Scalar>(tree: &Tree, weights: &EdgeWeightMap) -> LikelihoodVector<S> {
    let repr = if S::LOG_PRODUCTS {
        Representation::Log
    } else {
        Representation::Linear
    };
    let entries = tree
        .leaves()
        .map(|leaf| {
            let mut acc = if S::LOG_PRODUCTS { S::zero() } else { S::one() };
            let mut cur = leaf;
            while let Some(w) = weights.weight_from(cur) {
                if S::LOG_PRODUCTS {
                    acc += S::ln_count(w);
                } else {
                    acc *= S::from_count(w);
                }
                cur = tree.parent(cur).unwrap().unwrap();
            }
            (leaf, acc)
        })
        .collect();
    LikelihoodVector { entries, repr }
}

fn posterior_weights<S: Scalar>(
    prior: &LeafDistribution<S>,
    likelihood: &LikelihoodVector<S>,
) -> Result<Vec<(VertexId, S)>> {
    if prior.len() != likelihood.len()
        || prior
            .iter()
            .zip(likelihood.iter())
            .any(|((a, _), (b, _))| a != b)
    {
        return Err(Error::LeafSetMismatch);
    }
    let weights = match likelihood.repr {
        Representation::Linear => prior
            .iter()
            .zip(likelihood.iter())
            .map(|((l, p), (_, v))| (l, v.clone() * p.clone()))
            .collect(),
        Representation::Log => {
            // Rescale by the maximum log value before exponentiating.
            let max = likelihood
                .iter()
                .map(|(_, v)| v.clone())
                .fold(None::<S>, |acc, v| match acc {
                    Some(m) if m >= v => Some(m),
                    _ => Some(v),
                })
                .ok_or(Error::DegenerateEvidence)?;
            prior
                .iter()
                .zip(likelihood.iter())
                .map(|((l, p), (_, v))| (l, (v.clone() - max.clone()).exp() * p.clone()))
                .collect()
        }
    };
    Ok(weights)
}

/// Bayes' rule: posterior ∝ likelihood × prior, normalized over the leaf set.
///
/// The prior and likelihood must cover the same leaves. A likelihood whose
/// prior-weighted mass is zero has no posterior and is reported as degenerate
/// evidence.
pub fn posterior<S: Scalar>(
    prior: &LeafDistribution<S>,
    likelihood: &LikelihoodVector<S>,
) -> Result<LeafDistribution<S>> {
    LeafDistribution::from_weights(posterior_weights(prior, likelihood)?)
}

/// The normalization constant paired with [`posterior`]. In log
/// representation the value is the log of the prior-weighted mass, shifted
/// back by the maximum log-likelihood.
pub fn evidence<S: Scalar>(
    prior: &LeafDistribution<S>,
    likelihood: &LikelihoodVector<S>,
) -> Result<Evidence<S>> {
    let weights = posterior_weights(prior, likelihood)?;
    let total = weights
        .into_iter()
        .fold(S::zero(), |acc, (_, w)| acc + w);
    if total <= S::zero() {
        return Err(Error::DegenerateEvidence);
    }
    match likelihood.repr {
        Representation::Linear => Ok(Evidence {
            value: total,
            repr: Representation::Linear,
        }),
        Representation::Log => {
            let max = likelihood
                .iter()
                .map(|(_, v)| v.clone())
                .fold(None::<S>, |acc, v| match acc {
                    Some(m) if m >= v => Some(m),
                    _ => Some(v),
                })
                .expect("non-empty");
            Ok(Evidence {
                value: max + total.ln(),
                repr: Representation::Log,
            })
        }
    }
}

/// Linear blend `q·prior + (1−q)·posterior` per leaf, for `q` in [0, 1].
pub fn mixture<S: Scalar>(
    prior: &LeafDistribution<S>,
    post: &LeafDistribution<S>,
    q: S,
) -> Result<LeafDistribution<S>> {
    if q < S::zero() || q > S::one() {
        return Err(Error::MixtureWeightOutOfRange(q.to_string()));
    }
    if !prior.same_support(post) {
        return Err(Error::LeafSetMismatch);
    }
    let complement = S::one() - q.clone();
    let entries = prior
        .iter()
        .zip(post.iter())
        .map(|((l, p), (_, r))| (l, q.clone() * p.clone() + complement.clone() * r.clone()))
        .collect();
    Ok(LeafDistribution { entries })
}

/// Parameters of a smoothly oscillating mixture weight.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OscillatingQ {
    pub q_min: f64,
    pub q_max: f64,
    pub period: u32,
}

impl OscillatingQ {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.q_min)
            || !(0.0..=1.0).contains(&self.q_max)
            || self.q_min > self.q_max
        {
            return Err(Error::InvalidConfig(format!(
                "oscillation bounds must satisfy 0 <= q_min <= q_max <= 1, got [{}, {}]",
                self.q_min, self.q_max
            )));
        }
        if self.period < 1 {
            return Err(Error::InvalidConfig(
                "oscillation period must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Cosine schedule between `q_max` (at t = 0) and `q_min` (at half period):
/// `q(t) = q_min + (q_max − q_min)·(1 + cos(2πt/period))/2`.
pub fn oscillating_q(t: TimeIndex, params: &OscillatingQ) -> Result<f64> {
    params.validate()?;
    let phase = 2.0 * std::f64::consts::PI * f64::from(t.0) / f64::from(params.period);
    Ok(params.q_min + (params.q_max - params.q_min) * (1.0 + phase.cos()) / 2.0)
}
