//! Connected-component tree. Each node is a connected component of the
//! subgraph formed by the edges whose ESS exceeds the node's floor; children
//! come from deleting the lowest ESS band still present in the node.

mod query;
mod update;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dijkstra::UNREACHED;
use crate::error::{domain, Result};
use crate::graph::{RoadGraph, VertexId};
use crate::par;
use crate::persist;

pub use query::{border_prune, CT_RULES};
pub use update::EdgeChange;

pub type NodeId = u32;

const MAGIC: &[u8; 8] = b"KSNN-CT ";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BorderMeta {
    pub vertex: VertexId,
    /// Shortest in-node distance to another border; `None` if unreachable.
    pub min_border_dist: Option<u64>,
    /// Shortest in-node distance to a POI of the node; `None` if unreachable.
    pub min_poi_dist: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CtNode {
    pub id: NodeId,
    /// The node holds only edges with ESS strictly above this value.
    pub floor: u32,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub depth: u32,
    pub vertices: Vec<VertexId>,
    pub pois: Vec<VertexId>,
    pub borders: Vec<BorderMeta>,
}

impl CtNode {
    pub fn poi_count(&self) -> usize {
        self.pois.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn border(&self, v: VertexId) -> Option<&BorderMeta> {
        self.borders.binary_search_by_key(&v, |b| b.vertex).ok().map(|i| &self.borders[i])
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CtTree {
    nodes: Vec<Option<CtNode>>,
    root: NodeId,
    /// Per vertex, the nodes containing it from the root down.
    locator: Vec<Vec<NodeId>>,
    /// Per vertex, the locator depth of the highest node it is a border of.
    first_border_depth: Vec<Option<u32>>,
    /// Upper bounds of the ESS bands removed level by level.
    bands: Vec<u32>,
    height_cap: Option<u32>,
    free: Vec<NodeId>,
}

/// Upper bounds of `h` contiguous ESS bands covering `[1, s_max]`; one band
/// per score when there is no cap.
fn band_bounds(s_max: u32, height_cap: Option<u32>) -> Vec<u32> {
    match height_cap {
        Some(h) if h >= 1 && h < s_max => {
            let width = s_max.div_ceil(h);
            let mut b: Vec<u32> = (1..=h).map(|i| (i * width).min(s_max)).collect();
            b.dedup();
            b
        }
        _ => (1..=s_max).collect(),
    }
}

impl CtTree {
    pub fn build(graph: &RoadGraph, height_cap: Option<u32>) -> Result<CtTree> {
        if height_cap == Some(0) {
            return domain("height cap must be positive");
        }
        let mut t = CtTree {
            nodes: Vec::new(),
            root: 0,
            locator: vec![Vec::new(); graph.vertex_count()],
            first_border_depth: vec![None; graph.vertex_count()],
            bands: band_bounds(graph.s_max(), height_cap),
            height_cap,
            free: Vec::new(),
        };
        let all: Vec<VertexId> = (0..graph.vertex_count() as VertexId).collect();
        let created = t.build_subtree(graph, all, 0, None, 0);
        t.root = created[0];
        t.refresh_metadata(graph, &created);
        t.refresh_locators(graph, created[0]);
        Ok(t)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &CtNode {
        self.nodes[id as usize].as_ref().expect("live node id")
    }

    fn node_mut(&mut self, id: NodeId) -> &mut CtNode {
        self.nodes[id as usize].as_mut().expect("live node id")
    }

    pub fn nodes(&self) -> impl Iterator<Item = &CtNode> {
        self.nodes.iter().flatten()
    }

    pub fn node_count(&self) -> usize {
        self.nodes().count()
    }

    pub fn height(&self) -> u32 {
        self.nodes().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn height_cap(&self) -> Option<u32> {
        self.height_cap
    }

    pub fn locator(&self, v: VertexId) -> &[NodeId] {
        &self.locator[v as usize]
    }

    /// Band upper bound for a node whose lowest edge ESS is `m`.
    fn band_upper(&self, m: u32) -> u32 {
        *self.bands.iter().find(|&&b| b >= m).expect("ESS within [1, s_max]")
    }

    /// Child floor and components of a node, or `None` for a leaf.
    fn split(&self, graph: &RoadGraph, vertices: &[VertexId], floor: u32) -> Option<(u32, Vec<Vec<VertexId>>)> {
        let (mut lo, mut hi) = (u32::MAX, 0);
        for &v in vertices {
            for inc in graph.neighbors(v) {
                if inc.ess > floor {
                    lo = lo.min(inc.ess);
                    hi = hi.max(inc.ess);
                }
            }
        }
        if lo == u32::MAX {
            return None;
        }
        let ub = self.band_upper(lo);
        if hi <= ub {
            return None;
        }
        Some((ub, components(graph, vertices, ub)))
    }

    /// Builds the subtree for a component and returns the new node ids in
    /// creation order, the subtree root first.
    fn build_subtree(
        &mut self,
        graph: &RoadGraph,
        vertices: Vec<VertexId>,
        floor: u32,
        parent: Option<NodeId>,
        depth: u32,
    ) -> Vec<NodeId> {
        let mut created = Vec::new();
        let mut stack = vec![(vertices, floor, parent, depth)];
        while let Some((vertices, floor, parent, depth)) = stack.pop() {
            let id = self.alloc();
            created.push(id);
            if let Some(p) = parent {
                self.node_mut(p).children.push(id);
            }
            let split = self.split(graph, &vertices, floor);
            let pois = vertices.iter().copied().filter(|&v| graph.is_poi(v)).collect();
            if let Some((child_floor, comps)) = split {
                for c in comps.into_iter().rev() {
                    stack.push((c, child_floor, Some(id), depth + 1));
                }
            }
            self.nodes[id as usize] = Some(CtNode {
                id,
                floor,
                parent,
                children: Vec::new(),
                depth,
                vertices,
                pois,
                borders: Vec::new(),
            });
        }
        created
    }

    fn alloc(&mut self) -> NodeId {
        if let Some(i) = self.free.pop() {
            return i;
        }
        self.nodes.push(None);
        (self.nodes.len() - 1) as NodeId
    }

    fn refresh_metadata(&mut self, graph: &RoadGraph, ids: &[NodeId]) {
        let metas = par::map_any(ids, |&id| node_borders(graph, self.node(id)));
        for (&id, m) in ids.iter().zip(metas) {
            self.node_mut(id).borders = m;
        }
    }

    fn refresh_poi_metadata(&mut self, graph: &RoadGraph, ids: &[NodeId]) {
        for &id in ids {
            let n = self.node(id);
            let pois: Vec<VertexId> = n.vertices.iter().copied().filter(|&v| graph.is_poi(v)).collect();
            let dist = local_dijkstra(graph, &n.vertices, n.floor, &pois, |_, _| false).0;
            let borders = n
                .borders
                .iter()
                .map(|b| BorderMeta { min_poi_dist: finite(dist[local(&n.vertices, b.vertex)]), ..*b })
                .collect();
            let n = self.node_mut(id);
            n.pois = pois;
            n.borders = borders;
        }
    }

    /// Recomputes locator chains and border depths for every vertex under `top`.
    fn refresh_locators(&mut self, graph: &RoadGraph, top: NodeId) {
        let depth = self.node(top).depth as usize;
        let nodes = &self.nodes;
        for &v in &nodes[top as usize].as_ref().expect("live node id").vertices {
            self.locator[v as usize].truncate(depth);
        }
        let mut stack = vec![top];
        while let Some(id) = stack.pop() {
            let n = nodes[id as usize].as_ref().expect("live node id");
            for &v in &n.vertices {
                self.locator[v as usize].push(id);
            }
            stack.extend(n.children.iter().rev());
        }
        for v in self.node(top).vertices.clone() {
            self.refresh_border_depth(graph, v);
        }
    }

    fn refresh_border_depth(&mut self, graph: &RoadGraph, v: VertexId) {
        let fbd = graph.min_incident_ess(v).and_then(|m| {
            self.locator[v as usize]
                .iter()
                .position(|&id| self.node(id).floor >= m)
                .map(|d| d as u32)
        });
        self.first_border_depth[v as usize] = fbd;
    }

    /// Deepest node on the source's chain holding at least `k` POIs.
    pub fn locate_start(&self, v_l: VertexId, k: usize) -> NodeId {
        self.locator[v_l as usize]
            .iter()
            .rev()
            .copied()
            .find(|&id| self.node(id).poi_count() >= k)
            .unwrap_or(self.root)
    }

    /// Highest node at or below `cur` on `v`'s chain for which `v` is a border.
    pub fn check_border(&self, v: VertexId, cur: NodeId) -> Option<NodeId> {
        let fbd = self.first_border_depth[v as usize]?;
        let d = fbd.max(self.node(cur).depth);
        self.locator[v as usize].get(d as usize).copied()
    }

    /// Whether `v` is a border of node `id`.
    pub fn is_border(&self, v: VertexId, id: NodeId) -> bool {
        match self.first_border_depth[v as usize] {
            Some(d) => d <= self.node(id).depth && self.node(id).contains(v),
            None => false,
        }
    }

    /// Id-independent form of the tree, used to compare an updated tree with
    /// a fresh build.
    pub fn canonical(&self) -> CtCanonical {
        let key = |id: NodeId| {
            let n = self.node(id);
            (n.floor, n.vertices[0])
        };
        let nodes = self
            .nodes()
            .map(|n| {
                (
                    key(n.id),
                    CanonNode {
                        parent: n.parent.map(key),
                        depth: n.depth,
                        vertices: n.vertices.clone(),
                        pois: n.pois.clone(),
                        borders: n.borders.clone(),
                    },
                )
            })
            .collect();
        let locators = self.locator.iter().map(|c| c.iter().map(|&id| key(id)).collect()).collect();
        CtCanonical { nodes, locators, first_border_depth: self.first_border_depth.clone() }
    }

    pub fn save(&self, path: &Path, graph: &RoadGraph) -> Result<()> {
        persist::save(path, MAGIC, &graph.content_hash(), self)
    }

    pub fn load(path: &Path, graph: &RoadGraph) -> Result<CtTree> {
        persist::load(path, MAGIC, &graph.content_hash())
    }

    pub fn is_index_file(path: &Path) -> Result<bool> {
        Ok(&persist::peek_magic(path)? == MAGIC)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonNode {
    pub parent: Option<(u32, VertexId)>,
    pub depth: u32,
    pub vertices: Vec<VertexId>,
    pub pois: Vec<VertexId>,
    pub borders: Vec<BorderMeta>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtCanonical {
    pub nodes: BTreeMap<(u32, VertexId), CanonNode>,
    pub locators: Vec<Vec<(u32, VertexId)>>,
    pub first_border_depth: Vec<Option<u32>>,
}

fn finite(d: u64) -> Option<u64> {
    (d != UNREACHED).then_some(d)
}

fn local(vertices: &[VertexId], v: VertexId) -> usize {
    vertices.binary_search(&v).expect("vertex inside node")
}

/// Connected components of `vertices` using edges with ESS above `floor`,
/// each sorted, ordered by smallest vertex.
fn components(graph: &RoadGraph, vertices: &[VertexId], floor: u32) -> Vec<Vec<VertexId>> {
    let mut comp = vec![usize::MAX; vertices.len()];
    let mut out = Vec::new();
    for start in 0..vertices.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        let cid = out.len();
        comp[start] = cid;
        let mut members = vec![vertices[start]];
        let mut i = 0;
        while i < members.len() {
            let v = members[i];
            i += 1;
            for inc in graph.neighbors(v) {
                if inc.ess <= floor {
                    continue;
                }
                let j = local(vertices, inc.to);
                if comp[j] == usize::MAX {
                    comp[j] = cid;
                    members.push(inc.to);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Shortest distances inside a node (its vertices, edges above `floor`),
/// indexed like `vertices`.
fn local_dijkstra<S>(
    graph: &RoadGraph,
    vertices: &[VertexId],
    floor: u32,
    sources: &[VertexId],
    mut stop: S,
) -> (Vec<u64>, Option<VertexId>)
where
    S: FnMut(VertexId, u64) -> bool,
{
    let mut dist = vec![UNREACHED; vertices.len()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[local(vertices, s)] = 0;
        heap.push(Reverse((0u64, s)));
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[local(vertices, v)] {
            continue;
        }
        if stop(v, d) {
            return (dist, Some(v));
        }
        for inc in graph.neighbors(v) {
            if inc.ess <= floor {
                continue;
            }
            let j = local(vertices, inc.to);
            let nd = d + inc.length as u64;
            if nd < dist[j] {
                dist[j] = nd;
                heap.push(Reverse((nd, inc.to)));
            }
        }
    }
    (dist, None)
}

/// Border vertices of a node with their in-node minimum distances.
fn node_borders(graph: &RoadGraph, n: &CtNode) -> Vec<BorderMeta> {
    if n.parent.is_none() {
        return Vec::new();
    }
    let borders: Vec<VertexId> = n
        .vertices
        .iter()
        .copied()
        .filter(|&v| graph.min_incident_ess(v).is_some_and(|m| m <= n.floor))
        .collect();
    if borders.is_empty() {
        return Vec::new();
    }
    let to_poi = local_dijkstra(graph, &n.vertices, n.floor, &n.pois, |_, _| false).0;
    borders
        .iter()
        .map(|&b| {
            let (dist, hit) = local_dijkstra(graph, &n.vertices, n.floor, &[b], |v, _| {
                v != b && borders.binary_search(&v).is_ok()
            });
            BorderMeta {
                vertex: b,
                min_border_dist: hit.map(|h| dist[local(&n.vertices, h)]),
                min_poi_dist: finite(to_poi[local(&n.vertices, b)]),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn bands() {
        assert_eq!(band_bounds(4, None), vec![1, 2, 3, 4]);
        assert_eq!(band_bounds(10, Some(5)), vec![2, 4, 6, 8, 10]);
        assert_eq!(band_bounds(10, Some(3)), vec![4, 8, 10]);
        assert_eq!(band_bounds(3, Some(7)), vec![1, 2, 3]);
    }

    #[test]
    fn uniform_ess_is_a_single_node() {
        let g = RoadGraph::from_edges(3, 4, [Edge::new(0, 1, 1, 2), Edge::new(1, 2, 1, 2)], [2]).unwrap();
        let t = CtTree::build(&g, None).unwrap();
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.locate_start(0, 1), t.root());
    }

    #[test]
    fn splits_on_lowest_score() {
        // Two safe pairs joined by an unsafe edge.
        let g = RoadGraph::from_edges(
            4,
            3,
            [Edge::new(0, 1, 2, 3), Edge::new(1, 2, 5, 1), Edge::new(2, 3, 1, 3)],
            [0, 3],
        )
        .unwrap();
        let t = CtTree::build(&g, None).unwrap();
        let root = t.node(t.root());
        assert_eq!(root.children.len(), 2);
        let left = t.node(root.children[0]);
        assert_eq!((left.floor, left.vertices.clone()), (1, vec![0, 1]));
        let b = left.border(1).unwrap();
        assert_eq!((b.min_border_dist, b.min_poi_dist), (None, Some(2)));
        assert!(left.border(0).is_none());
        assert_eq!(t.check_border(1, t.root()), Some(left.id));
        assert_eq!(t.locate_start(0, 1), left.id);
        assert_eq!(t.locate_start(0, 2), t.root());
    }
}
