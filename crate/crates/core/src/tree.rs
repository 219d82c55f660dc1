//! The append-only time-ordered rooted tree and its path/weight machinery.
//!
//! Vertices are numbered densely in creation order (root = 0), so vertex ids
//! double as a topological order: every parent has a smaller id than its
//! children. Growth happens through [`Tree::append_batch`], which attaches a
//! batch of new vertices to leaves of the snapshot taken before the batch —
//! new vertices may only attach to existing leaves, attachments always point
//! backward in time, and several new vertices may pick the same leaf within
//! one batch.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Dense vertex identifier, assigned in creation order starting at the root.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Discrete growth interval number; the root is created in interval 0.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct TimeIndex(pub u32);

impl fmt::Display for TimeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub created_at: TimeIndex,
    /// `None` only for the root.
    pub parent: Option<VertexId>,
}

/// Directed ordered path from a vertex to the root.
///
/// Stored as the vertex sequence starting at the vertex and ending at the
/// root; consecutive entries satisfy the parent relation. The path of the
/// root itself has no attachments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    vertices: Vec<VertexId>,
}

impl Path {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn terminal(&self) -> VertexId {
        self.vertices[0]
    }

    /// Number of attachments (edges) on the path.
    pub fn attachment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Attachments as (child, parent) pairs, ordered from the starting vertex
    /// toward the root.
    pub fn attachments(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }
}

/// Multiplicity of every attachment: the number of leaf-to-root paths passing
/// through it, which equals the leaf count of the subtree hanging off the
/// attachment's child side.
///
/// Since each vertex has exactly one parent, an attachment is keyed by its
/// child vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeWeightMap {
    /// `entries[child] = (parent, weight)`; `None` for the root slot.
    entries: Vec<Option<(VertexId, u64)>>,
}

impl EdgeWeightMap {
    /// Weight of the attachment issued by `child`, or `None` for the root /
    /// unknown ids.
    pub fn weight_from(&self, child: VertexId) -> Option<u64> {
        self.entries.get(child.index()).and_then(|e| e.map(|(_, w)| w))
    }

    /// Weight of the attachment `child → parent`, validating the pair.
    pub fn get(&self, child: VertexId, parent: VertexId) -> Option<u64> {
        self.entries
            .get(child.index())
            .and_then(|e| *e)
            .filter(|(p, _)| *p == parent)
            .map(|(_, w)| w)
    }

    /// All attachments as (child, parent, weight), in child-id order.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, VertexId, u64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|(p, w)| (VertexId(i as u32), p, w)))
    }

    pub fn len(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(|e| e.is_none())
    }
}

/// Append-only time-ordered rooted tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    vertices: Vec<Vertex>,
    children: Vec<Vec<VertexId>>,
    leaf_set: BTreeSet<VertexId>,
    latest: TimeIndex,
}

impl Default for Tree {
    fn default() -> Self {
        Self::new()
    }
}

impl Tree {
    /// A tree holding only the root, created in interval 0. The root counts
    /// as a leaf until something attaches to it.
    pub fn new() -> Self {
        Tree {
            vertices: vec![Vertex {
                id: VertexId(0),
                created_at: TimeIndex(0),
                parent: None,
            }],
            children: vec![Vec::new()],
            leaf_set: BTreeSet::from([VertexId(0)]),
            latest: TimeIndex(0),
        }
    }

    pub fn root() -> VertexId {
        VertexId(0)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, v: VertexId) -> Result<&Vertex> {
        self.vertices.get(v.index()).ok_or(Error::UnknownVertex(v))
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = &Vertex> + '_ {
        self.vertices.iter()
    }

    pub fn parent(&self, v: VertexId) -> Result<Option<VertexId>> {
        Ok(self.vertex(v)?.parent)
    }

    pub fn created_at(&self, v: VertexId) -> Result<TimeIndex> {
        Ok(self.vertex(v)?.created_at)
    }

    pub fn children(&self, v: VertexId) -> Result<&[VertexId]> {
        self.vertex(v)?;
        Ok(&self.children[v.index()])
    }

    /// Latest creation interval present in the tree.
    pub fn latest_time(&self) -> TimeIndex {
        self.latest
    }

    /// The current leaf set: exactly the vertices with no children.
    pub fn leaf_set(&self) -> &BTreeSet<VertexId> {
        &self.leaf_set
    }

    /// Leaves in ascending id order.
    pub fn leaves(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.leaf_set.iter().copied()
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.leaf_set.contains(&v)
    }

    /// Appends one new vertex per target, all created in interval `t`.
    ///
    /// Every target must be a leaf of the snapshot taken before any vertex of
    /// this batch is appended, and `t` must exceed every existing creation
    /// time. The same leaf may appear several times. Returns the new ids in
    /// creation order; on error the tree is unchanged. An empty batch leaves
    /// the tree unchanged (the interval simply advances).
    pub fn append_batch(&mut self, t: TimeIndex, targets: &[VertexId]) -> Result<Vec<VertexId>> {
        if t <= self.latest {
            return Err(Error::StaleTimeIndex {
                t,
                latest: self.latest,
            });
        }
        for &target in targets {
            if target.index() >= self.vertices.len() {
                return Err(Error::UnknownVertex(target));
            }
            if !self.leaf_set.contains(&target) {
                return Err(Error::NotALeaf(target));
            }
        }
        if targets.is_empty() {
            return Ok(Vec::new());
        }

        let mut new_ids = Vec::with_capacity(targets.len());
        for &target in targets {
            let id = VertexId(self.vertices.len() as u32);
            self.vertices.push(Vertex {
                id,
                created_at: t,
                parent: Some(target),
            });
            self.children.push(Vec::new());
            self.children[target.index()].push(id);
            new_ids.push(id);
        }
        for &target in targets {
            self.leaf_set.remove(&target);
        }
        self.leaf_set.extend(new_ids.iter().copied());
        self.latest = t;
        Ok(new_ids)
    }

    /// The unique parent-chain from `v` to the root.
    pub fn path_to_root(&self, v: VertexId) -> Result<Path> {
        self.vertex(v)?;
        let mut vertices = vec![v];
        let mut cur = v;
        while let Some(p) = self.vertices[cur.index()].parent {
            vertices.push(p);
            cur = p;
        }
        Ok(Path { vertices })
    }

    /// Multiplicity of every attachment, computed in one backward pass over
    /// vertices in reverse id order (a valid reverse-topological order since
    /// ids are time-ordered): a leaf's attachment carries weight 1, a deep
    /// vertex's attachment carries the sum of its incoming attachment
    /// weights.
    pub fn attachment_weights(&self) -> EdgeWeightMap {
        let n = self.vertices.len();
        let mut subtree = vec![0u64; n];
        for i in (0..n).rev() {
            subtree[i] = if self.children[i].is_empty() {
                1
            } else {
                self.children[i].iter().map(|c| subtree[c.index()]).sum()
            };
        }
        let entries = self
            .vertices
            .iter()
            .map(|v| v.parent.map(|p| (p, subtree[v.id.index()])))
            .collect();
        EdgeWeightMap { entries }
    }
}
