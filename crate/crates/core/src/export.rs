//! Serialization of runs: DOT graphs, canonical trajectory JSON, per-interval
//! frame files for external plotting, ensemble CSV, and the run manifest.
//!
//! Every export is byte-deterministic. JSON is canonical — object keys
//! sorted, floats printed with 17 significant digits — so content digests are
//! reproducible across runs.

use crate::analysis::{highlighted_path, EnsembleSummary};
use crate::error::{Error, Result};
use crate::growth::{FrameRecord, GrowthConfig, Trajectory};
use crate::inference::LeafDistribution;
use crate::tree::{EdgeWeightMap, Tree, VertexId};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

/// Directed graph in DOT syntax: one node per vertex annotated with its
/// creation interval, one edge per attachment written child → parent, labeled
/// with the attachment weight when weights are supplied.
pub fn export_dot(tree: &Tree, weights: Option<&EdgeWeightMap>) -> String {
    let mut out = String::from("digraph tree {\n  rankdir=RL;\n");
    for v in tree.vertices() {
        let _ = writeln!(out, "  v{} [label=\"{} @{}\"];", v.id, v.id, v.created_at);
    }
    for v in tree.vertices() {
        if let Some(parent) = v.parent {
            match weights.and_then(|w| w.weight_from(v.id)) {
                Some(w) => {
                    let _ = writeln!(out, "  v{} -> v{} [label=\"{}\"];", v.id, parent, w);
                }
                None => {
                    let _ = writeln!(out, "  v{} -> v{};", v.id, parent);
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Floats are rendered with 17 significant digits, enough for an exact f64
/// round trip.
fn format_f64(x: f64) -> String {
    debug_assert!(x.is_finite());
    format!("{x:.16e}")
}

/// Renders a `serde_json::Value` canonically: keys sorted (the default map is
/// ordered), no whitespace, floats at 17 significant digits.
pub fn canonical_json(value: &serde_json::Value) -> String {
    let mut out = String::new();
    write_canonical(value, &mut out);
    out
}

fn write_canonical(value: &serde_json::Value, out: &mut String) {
    use serde_json::Value::*;
    match value {
        Null => out.push_str("null"),
        Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                out.push_str(&format_f64(n.as_f64().expect("finite number")));
            }
        }
        String(s) => {
            let _ = write!(out, "{}", serde_json::Value::String(s.clone()));
        }
        Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", serde_json::Value::String(key.clone()));
                out.push(':');
                write_canonical(item, out);
            }
            out.push('}');
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct VertexRepr {
    id: u32,
    t: u32,
    parent: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TreeRepr {
    vertices: Vec<VertexRepr>,
}

impl TreeRepr {
    fn of(tree: &Tree) -> Self {
        TreeRepr {
            vertices: tree
                .vertices()
                .map(|v| VertexRepr {
                    id: v.id.0,
                    t: v.created_at.0,
                    parent: v.parent.map(|p| p.0),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TrajectoryRepr {
    config: GrowthConfig,
    frames: Vec<FrameRecord>,
    final_distribution: LeafDistribution<f64>,
    tree: TreeRepr,
}

/// Canonical JSON for a run: configuration echo, per-interval frame records,
/// the final distribution and the final tree. Identical runs serialize to
/// identical bytes.
pub fn export_trajectory_json(traj: &Trajectory) -> String {
    let repr = TrajectoryRepr {
        config: traj.config.clone(),
        frames: traj.frames.clone(),
        final_distribution: traj.final_distribution.clone(),
        tree: TreeRepr::of(&traj.tree),
    };
    let value = serde_json::to_value(&repr).expect("trajectory serializes");
    let mut out = canonical_json(&value);
    out.push('\n');
    out
}

/// Rebuilds the tree by replaying the recorded attachments interval by
/// interval.
pub fn replay_frames(frames: &[FrameRecord]) -> Result<Tree> {
    let mut tree = Tree::new();
    for frame in frames {
        let targets: Vec<VertexId> = frame.attachments.iter().map(|(_, p)| *p).collect();
        let ids = tree.append_batch(frame.t, &targets)?;
        let recorded: Vec<VertexId> = frame.new_vertex_ids().collect();
        if ids != recorded {
            return Err(Error::MalformedTrajectory(format!(
                "frame t={} records child ids {:?} but replay assigns {:?}",
                frame.t, recorded, ids
            )));
        }
    }
    Ok(tree)
}

/// Parses trajectory JSON and validates it by replaying the attachments; the
/// replayed tree must match the serialized one vertex for vertex.
pub fn parse_trajectory_json(text: &str) -> Result<Trajectory> {
    let repr: TrajectoryRepr = serde_json::from_str(text)
        .map_err(|e| Error::MalformedTrajectory(e.to_string()))?;
    let tree = replay_frames(&repr.frames)?;
    if TreeRepr::of(&tree) != repr.tree {
        return Err(Error::MalformedTrajectory(
            "serialized tree does not match the replay of its frames".into(),
        ));
    }
    Ok(Trajectory {
        config: repr.config,
        frames: repr.frames,
        final_distribution: repr.final_distribution,
        tree,
    })
}

/// One emitted file with its content digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Inventory of an output directory: configuration echo, tool version and
/// per-file content digests — enough to verify a reproduced run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: GrowthConfig,
    pub files: Vec<ManifestEntry>,
}

impl RunManifest {
    pub fn new(config: &GrowthConfig) -> Self {
        RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            files: Vec::new(),
        }
    }

    /// Records a file's digest and writes it under `dir/name`.
    pub fn write_file(&mut self, dir: &Path, name: &str, contents: &str) -> Result<()> {
        let digest = Sha256::digest(contents.as_bytes());
        let mut sha256 = String::with_capacity(64);
        for byte in digest {
            let _ = write!(sha256, "{byte:02x}");
        }
        self.files.push(ManifestEntry {
            name: name.to_string(),
            sha256,
            bytes: contents.len() as u64,
        });
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        std::fs::write(&path, contents).map_err(|source| Error::Io { path, source })
    }

    pub fn merge(&mut self, other: RunManifest) {
        self.files.extend(other.files);
    }

    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("manifest serializes");
        let mut out = canonical_json(&value);
        out.push('\n');
        out
    }
}

struct FrameRow {
    id: u32,
    created_at: u32,
    parent: i64,
    is_leaf: u8,
    probability: Option<f64>,
    on_path: Option<bool>,
}

fn write_frame_table(rows: &[FrameRow], with_path_column: bool) -> String {
    let mut out = String::new();
    out.push_str("# id created_at parent is_leaf probability");
    if with_path_column {
        out.push_str(" on_path");
    }
    out.push('\n');
    for row in rows {
        let prob = match row.probability {
            Some(p) => format_f64(p),
            None => "-1".to_string(),
        };
        let _ = write!(
            out,
            "{} {} {} {} {}",
            row.id, row.created_at, row.parent, row.is_leaf, prob
        );
        if let Some(on_path) = row.on_path {
            let _ = write!(out, " {}", u8::from(on_path));
        }
        out.push('\n');
    }
    out
}

/// Rows for the first `horizon` vertices: leaves of the sampling snapshot
/// carry their sampling probability, everything else carries −1.
fn snapshot_rows(
    tree: &Tree,
    horizon: usize,
    distribution: &LeafDistribution<f64>,
    path: Option<&crate::tree::Path>,
) -> Vec<FrameRow> {
    tree.vertices()
        .take(horizon)
        .map(|v| {
            let probability = distribution.probability(v.id).copied();
            FrameRow {
                id: v.id.0,
                created_at: v.created_at.0,
                parent: v.parent.map_or(-1, |p| i64::from(p.0)),
                is_leaf: u8::from(probability.is_some()),
                probability,
                on_path: path.map(|p| p.contains(v.id)),
            }
        })
        .collect()
}

/// Writes the full frame inventory of a run into `dir`:
///
/// * one growth frame per interval — frame 0 is the settled initial snapshot;
///   frame k (k ≥ 1) shows interval k's new vertices (flagged non-leaf, no
///   probability) over the pre-batch snapshot, whose leaves carry the
///   sampling distribution used in that interval;
/// * a complete-tree frame with every vertex settled and the final policy
///   distribution;
/// * a highlighted-path frame repeating the complete frame with an extra
///   `on_path` column (longest path when sampling from the prior, maximum
///   posterior path otherwise).
///
/// Returns the manifest of the files written.
pub fn export_frames(traj: &Trajectory, dir: &Path) -> Result<RunManifest> {
    let mut manifest = RunManifest::new(&traj.config);
    let tree = &traj.tree;

    let initial = vec![FrameRow {
        id: 0,
        created_at: 0,
        parent: -1,
        is_leaf: 1,
        probability: Some(1.0),
        on_path: None,
    }];
    manifest.write_file(dir, "frame_0000.dat", &write_frame_table(&initial, false))?;

    for (i, frame) in traj.frames.iter().enumerate() {
        let rows = snapshot_rows(tree, frame.vertex_count as usize, &frame.distribution, None);
        let name = format!("frame_{:04}.dat", i + 1);
        manifest.write_file(dir, &name, &write_frame_table(&rows, false))?;
    }

    let n = traj.config.intervals as usize;
    let complete = snapshot_rows(tree, tree.vertex_count(), &traj.final_distribution, None);
    manifest.write_file(
        dir,
        &format!("frame_{n:04}_complete.dat"),
        &write_frame_table(&complete, false),
    )?;

    let highlight = highlighted_path(traj);
    let rows = snapshot_rows(
        tree,
        tree.vertex_count(),
        &traj.final_distribution,
        Some(&highlight.path),
    );
    manifest.write_file(
        dir,
        &format!("frame_{:04}_path.dat", n + 1),
        &write_frame_table(&rows, true),
    )?;

    Ok(manifest)
}

/// Long-format CSV: one row per (policy, statistic), leaf-count quantiles
/// flattened per interval. Column order and row order are fixed.
pub fn export_metrics_csv(summary: &EnsembleSummary) -> String {
    let mut out = String::from("policy,statistic,value\n");
    for group in &summary.groups {
        let scalar_rows = [
            ("runs", group.runs as f64),
            ("mean_attachment_count", group.mean_attachment_count),
            ("median_attachment_count", group.median_attachment_count),
            ("mean_attachment_length", group.mean_attachment_length),
            ("median_attachment_length", group.median_attachment_length),
        ];
        for (name, value) in scalar_rows {
            let _ = writeln!(out, "{},{},{}", group.policy, name, value);
        }
        for q in &group.leaf_count_quantiles {
            let _ = writeln!(out, "{},leaf_count_q10_t{:04},{}", group.policy, q.t, q.q10);
            let _ = writeln!(out, "{},leaf_count_q50_t{:04},{}", group.policy, q.t, q.q50);
            let _ = writeln!(out, "{},leaf_count_q90_t{:04},{}", group.policy, q.t, q.q90);
        }
    }
    out
}
