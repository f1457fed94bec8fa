use std::cmp::Ordering;

use crate::error::{domain, Result};
use crate::graph::{edge_tie, Edge, VertexId};
use crate::safety::{PathCost, SafetySignature};

/// A simple path from a fixed source, carried by value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchPath {
    vertices: Vec<VertexId>,
    cost: PathCost,
}

impl SearchPath {
    pub fn start(source: VertexId, s_max: u32) -> Self {
        SearchPath { vertices: vec![source], cost: PathCost::zero(s_max) }
    }

    pub fn tail(&self) -> VertexId {
        *self.vertices.last().expect("paths are never empty")
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn length(&self) -> u64 {
        self.cost.length()
    }

    pub fn signature(&self) -> &SafetySignature {
        &self.cost.sig
    }

    pub fn cost(&self) -> &PathCost {
        &self.cost
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn s_distance(&self, s: u32) -> Result<u64> {
        self.cost.sig.s_distance(s)
    }

    pub fn min_ess(&self) -> Result<u32> {
        self.cost.sig.min_ess()
    }

    /// Extends the path by an edge incident to its tail. Returns `Ok(None)`
    /// when the other endpoint is already on the path.
    pub fn concat(&self, edge: &Edge) -> Result<Option<SearchPath>> {
        let t = self.tail();
        let next = if edge.u == t {
            edge.v
        } else if edge.v == t {
            edge.u
        } else {
            return domain(format!("edge ({}, {}) is not incident to {t}", edge.u, edge.v));
        };
        if self.contains(next) {
            return Ok(None);
        }
        let mut vertices = self.vertices.clone();
        vertices.push(next);
        let cost = self.cost.with_edge(edge.ess, edge.length as u64, edge_tie(edge.key()));
        Ok(Some(SearchPath { vertices, cost }))
    }
}

pub(crate) const NO_PARENT: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
pub(crate) struct PathNode {
    pub vertex: VertexId,
    pub parent: u32,
    /// Engine-specific restriction attached to the path.
    pub aux: u32,
}

/// Parent-linked storage for the paths of one search.
#[derive(Default)]
pub(crate) struct PathArena {
    nodes: Vec<PathNode>,
}

impl PathArena {
    pub fn push(&mut self, vertex: VertexId, parent: u32, aux: u32) -> u32 {
        self.nodes.push(PathNode { vertex, parent, aux });
        (self.nodes.len() - 1) as u32
    }

    pub fn get(&self, i: u32) -> PathNode {
        self.nodes[i as usize]
    }

    pub fn contains(&self, mut i: u32, v: VertexId) -> bool {
        while i != NO_PARENT {
            let n = self.nodes[i as usize];
            if n.vertex == v {
                return true;
            }
            i = n.parent;
        }
        false
    }

    pub fn vertices(&self, mut i: u32) -> Vec<VertexId> {
        let mut out = Vec::new();
        while i != NO_PARENT {
            let n = self.nodes[i as usize];
            out.push(n.vertex);
            i = n.parent;
        }
        out.reverse();
        out
    }
}

/// Priority-queue entry; `BinaryHeap` pops the safest path first.
#[derive(Clone, Debug)]
pub(crate) struct Entry {
    pub cost: PathCost,
    pub len: u64,
    pub tail: VertexId,
    pub node: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .cmp(&self.cost)
            .then(other.tail.cmp(&self.tail))
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_builds_signature_and_rejects_cycles() {
        let p = SearchPath::start(0, 5);
        let p = p.concat(&Edge::new(0, 1, 3, 4)).unwrap().unwrap();
        assert_eq!(p.length(), 3);
        assert_eq!(p.s_distance(4).unwrap(), 3);
        assert_eq!(p.tail(), 1);
        assert!(p.concat(&Edge::new(1, 0, 3, 4)).unwrap().is_none());
        assert!(p.concat(&Edge::new(2, 3, 3, 4)).is_err());
    }

    #[test]
    fn arena_reconstructs_paths() {
        let mut a = PathArena::default();
        let r = a.push(4, NO_PARENT, 0);
        let b = a.push(7, r, 0);
        let c = a.push(2, b, 0);
        assert_eq!(a.vertices(c), vec![4, 7, 2]);
        assert!(a.contains(c, 4));
        assert!(!a.contains(b, 2));
    }
}
