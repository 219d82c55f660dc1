//! Diagnostics over grown trees: highlighted paths (longest / maximum
//! posterior) and ensemble statistics across independent runs.

use crate::error::Result;
use crate::growth::{run_indexed, GrowthConfig, Policy, Trajectory};
use crate::inference::LeafDistribution;
use crate::tree::{Path, Tree, VertexId};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A leaf-to-root path together with its density diagnostics. The attachment
/// length of an edge is the creation-interval difference it spans; long
/// attachments reach back to old leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathReport {
    pub path: Path,
    pub terminal_leaf: VertexId,
    pub attachment_count: usize,
    pub attachment_lengths: Vec<u32>,
}

impl PathReport {
    fn from_leaf(tree: &Tree, leaf: VertexId) -> Self {
        let path = tree.path_to_root(leaf).expect("leaf exists");
        let attachment_lengths = path
            .attachments()
            .map(|(child, parent)| {
                tree.created_at(child).unwrap().0 - tree.created_at(parent).unwrap().0
            })
            .collect::<Vec<_>>();
        PathReport {
            terminal_leaf: leaf,
            attachment_count: path.attachment_count(),
            attachment_lengths,
            path,
        }
    }

    /// Mean interval span of the path's attachments; 0 for the root-only
    /// path.
    pub fn mean_attachment_length(&self) -> f64 {
        if self.attachment_lengths.is_empty() {
            return 0.0;
        }
        self.attachment_lengths.iter().map(|&l| f64::from(l)).sum::<f64>()
            / self.attachment_lengths.len() as f64
    }
}

/// A leaf-to-root path with the most attachments; ties break toward the
/// smallest terminal leaf id.
pub fn longest_path(tree: &Tree) -> PathReport {
    let mut best: Option<PathReport> = None;
    for leaf in tree.leaves() {
        let report = PathReport::from_leaf(tree, leaf);
        match &best {
            Some(b) if b.attachment_count >= report.attachment_count => {}
            _ => best = Some(report),
        }
    }
    best.expect("tree has at least one leaf")
}

/// Path from the leaf of maximum probability (smallest id on ties) to the
/// root.
pub fn max_posterior_path(tree: &Tree, dist: &LeafDistribution<f64>) -> PathReport {
    PathReport::from_leaf(tree, dist.argmax())
}

/// The per-policy highlighted path: the longest path when sampling from the
/// prior, the maximum-probability path otherwise.
pub fn highlighted_path(traj: &Trajectory) -> PathReport {
    match traj.config.policy {
        Policy::Bayes0 => longest_path(&traj.tree),
        _ => max_posterior_path(&traj.tree, &traj.final_distribution),
    }
}

/// Leaf-count quantiles across runs at one interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafCountQuantiles {
    pub t: u32,
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
}

/// Statistics of one policy over an ensemble of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyStats {
    pub policy: String,
    pub runs: u32,
    pub mean_attachment_count: f64,
    pub median_attachment_count: f64,
    pub mean_attachment_length: f64,
    pub median_attachment_length: f64,
    pub leaf_count_quantiles: Vec<LeafCountQuantiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub config: GrowthConfig,
    pub runs: u32,
    pub groups: Vec<PolicyStats>,
}

impl EnsembleSummary {
    /// Concatenates the policy groups of several summaries (e.g. the same
    /// ensemble re-run under different policies). The first summary's config
    /// is echoed.
    pub fn merge(summaries: impl IntoIterator<Item = EnsembleSummary>) -> Option<EnsembleSummary> {
        let mut iter = summaries.into_iter();
        let mut merged = iter.next()?;
        for s in iter {
            merged.groups.extend(s.groups);
        }
        Some(merged)
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Linear-interpolation quantile of a sorted sample.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Executes `runs` independent trajectories under per-run sub-streams and
/// aggregates highlighted-path and leaf-count statistics. Runs execute on
/// the rayon pool; results are keyed by run index, so the aggregate is
/// independent of scheduling.
pub fn ensemble(config: &GrowthConfig, runs: u32) -> Result<EnsembleSummary> {
    assert!(runs >= 1, "an ensemble needs at least one run");
    config.validate()?;
    let trajectories: Vec<Trajectory> = (0..runs as u64)
        .into_par_iter()
        .map(|i| run_indexed(config, i))
        .collect::<Result<_>>()?;

    let mut counts = Vec::with_capacity(trajectories.len());
    let mut lengths = Vec::with_capacity(trajectories.len());
    for traj in &trajectories {
        let report = highlighted_path(traj);
        counts.push(report.attachment_count as f64);
        lengths.push(report.mean_attachment_length());
    }
    let mut sorted_counts = counts.clone();
    sorted_counts.sort_by(f64::total_cmp);
    let mut sorted_lengths = lengths.clone();
    sorted_lengths.sort_by(f64::total_cmp);

    // Leaf-count trajectory: interval 0 always holds the lone root.
    let intervals = config.intervals;
    let mut quantiles = Vec::with_capacity(intervals as usize);
    quantiles.push(LeafCountQuantiles {
        t: 0,
        q10: 1.0,
        q50: 1.0,
        q90: 1.0,
    });
    for (i, t) in (1..intervals).enumerate() {
        let mut sample: Vec<f64> = trajectories
            .iter()
            .map(|traj| f64::from(traj.frames[i].leaf_count))
            .collect();
        sample.sort_by(f64::total_cmp);
        quantiles.push(LeafCountQuantiles {
            t,
            q10: quantile(&sample, 0.1),
            q50: quantile(&sample, 0.5),
            q90: quantile(&sample, 0.9),
        });
    }

    let stats = PolicyStats {
        policy: config.policy.to_string(),
        runs,
        mean_attachment_count: mean(&counts),
        median_attachment_count: median(&sorted_counts),
        mean_attachment_length: mean(&lengths),
        median_attachment_length: median(&sorted_lengths),
        leaf_count_quantiles: quantiles,
    };
    Ok(EnsembleSummary {
        config: config.clone(),
        runs,
        groups: vec![stats],
    })
}
