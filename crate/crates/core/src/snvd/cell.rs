use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::{BorderPoint, EdgeCell, Snvd, SCALE};
use crate::graph::{edge_tie, EdgeKey, RoadGraph, VertexId};
use crate::safety::PathCost;

/// Precomputed unconstrained safest path inside one cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellArc {
    /// Scaled cost.
    pub cost: PathCost,
    /// Graph vertices along the path; split points are omitted.
    pub vertices: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoronoiCell {
    pub generator: VertexId,
    /// Vertices labelled with this generator, ascending.
    pub vertices: Vec<VertexId>,
    /// Border points touching the cell, ascending.
    pub borders: Vec<BorderPoint>,
    /// Generators of cells sharing a border with this one.
    pub adjacent: Vec<VertexId>,
    /// `to_border[i][j]`: safest in-cell path from border `i` to border `j`.
    pub to_border: Vec<Vec<Option<CellArc>>>,
    /// Safest in-cell path from each border to the generator.
    pub to_gen: Vec<Option<CellArc>>,
    /// Scaled shortest in-cell distance from each border to another border.
    pub min_border_dist: Vec<Option<u64>>,
    /// Scaled shortest in-cell distance from each border to the generator.
    pub min_poi_dist: Vec<Option<u64>>,
}

impl VoronoiCell {
    pub fn border_index(&self, b: BorderPoint) -> Option<usize> {
        self.borders.binary_search(&b).ok()
    }
}

/// A position a path inside the diagram can occupy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum CellNode {
    V(VertexId),
    S(EdgeKey),
}

impl From<BorderPoint> for CellNode {
    fn from(b: BorderPoint) -> Self {
        match b {
            BorderPoint::Vertex(v) => CellNode::V(v),
            BorderPoint::Split(k) => CellNode::S(k),
        }
    }
}

/// Step to a neighbouring position: target, scaled length, ESS, tie weight.
pub(crate) type Step = (CellNode, u64, u32, u64);

impl Snvd {
    /// Steps out of `node` over edge parts whose cell passes `allow`.
    pub(crate) fn cell_steps<F: Fn(VertexId) -> bool>(
        &self,
        graph: &RoadGraph,
        node: CellNode,
        allow: F,
        out: &mut Vec<Step>,
    ) {
        out.clear();
        match node {
            CellNode::V(x) => {
                for inc in graph.neighbors(x) {
                    let key = EdgeKey::new(x, inc.to);
                    let len = inc.length as u64 * SCALE;
                    match self.edge_cells.get(&key) {
                        Some(&EdgeCell::Whole(g)) if allow(g) => {
                            out.push((CellNode::V(inc.to), len, inc.ess, inc.tie))
                        }
                        Some(&EdgeCell::Split { at, u_gen, v_gen }) => {
                            let (g, part, tie) =
                                if x == key.u { (u_gen, at, inc.tie) } else { (v_gen, len - at, 0) };
                            if allow(g) {
                                out.push((CellNode::S(key), part, inc.ess, tie));
                            }
                        }
                        _ => {}
                    }
                }
            }
            CellNode::S(key) => {
                let Some(&EdgeCell::Split { at, u_gen, v_gen }) = self.edge_cells.get(&key) else {
                    return;
                };
                let e = graph.edge(key.u, key.v).expect("split edge exists");
                let len = e.length as u64 * SCALE;
                if allow(u_gen) {
                    out.push((CellNode::V(key.u), at, e.ess, edge_tie(key)));
                }
                if allow(v_gen) {
                    out.push((CellNode::V(key.v), len - at, e.ess, 0));
                }
            }
        }
    }

    /// Safest-path tree from `src` over cells passing `allow`. Returns the
    /// settled cost and predecessor of every reached position.
    pub(crate) fn cell_search<F: Fn(VertexId) -> bool>(
        &self,
        graph: &RoadGraph,
        src: CellNode,
        allow: F,
        mut on_settle: impl FnMut(CellNode),
    ) -> HashMap<CellNode, (PathCost, Option<CellNode>)> {
        let mut best: HashMap<CellNode, (PathCost, Option<CellNode>)> = HashMap::new();
        let mut heap = BinaryHeap::new();
        let mut steps = Vec::new();
        best.insert(src, (PathCost::zero(graph.s_max()), None));
        heap.push(Reverse(HeapItem(PathCost::zero(graph.s_max()), src)));
        while let Some(Reverse(HeapItem(cost, node))) = heap.pop() {
            if best.get(&node).is_some_and(|(c, _)| *c < cost) {
                continue;
            }
            on_settle(node);
            self.cell_steps(graph, node, &allow, &mut steps);
            for &(to, len, ess, tie) in &steps {
                let nc = cost.with_edge(ess, len, tie);
                if best.get(&to).is_none_or(|(c, _)| nc < *c) {
                    best.insert(to, (nc.clone(), Some(node)));
                    heap.push(Reverse(HeapItem(nc, to)));
                }
            }
        }
        best
    }
}

#[derive(PartialEq, Eq)]
pub(crate) struct HeapItem(pub PathCost, pub CellNode);

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graph vertices on the tree path from the search source to `to`.
pub(crate) fn trace(tree: &HashMap<CellNode, (PathCost, Option<CellNode>)>, to: CellNode) -> Vec<VertexId> {
    let mut out = Vec::new();
    let mut cur = Some(to);
    while let Some(n) = cur {
        if let CellNode::V(v) = n {
            out.push(v);
        }
        cur = tree[&n].1;
    }
    out.reverse();
    out
}

/// Shortest scaled in-cell distances from `src`, stopping at the first
/// position accepted by `stop`.
fn cell_lengths(
    d: &Snvd,
    graph: &RoadGraph,
    gen: VertexId,
    src: CellNode,
    stop: impl Fn(CellNode) -> bool,
) -> Option<u64> {
    let mut best: HashMap<CellNode, u64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let mut steps = Vec::new();
    best.insert(src, 0);
    heap.push(Reverse((0u64, src)));
    while let Some(Reverse((dist, node))) = heap.pop() {
        if best[&node] < dist {
            continue;
        }
        if node != src && stop(node) {
            return Some(dist);
        }
        d.cell_steps(graph, node, |g| g == gen, &mut steps);
        for &(to, len, _, _) in &steps {
            let nd = dist + len;
            if best.get(&to).is_none_or(|&b| nd < b) {
                best.insert(to, nd);
                heap.push(Reverse((nd, to)));
            }
        }
    }
    None
}

pub(super) fn build_cell(
    d: &Snvd,
    graph: &RoadGraph,
    gen: VertexId,
    vertices: Vec<VertexId>,
    borders: Vec<BorderPoint>,
) -> VoronoiCell {
    let in_cell = |g: VertexId| g == gen;
    let nodes: Vec<CellNode> = borders.iter().map(|&b| b.into()).collect();
    let mut to_border = Vec::with_capacity(borders.len());
    let mut to_gen = Vec::with_capacity(borders.len());
    let mut min_border_dist = Vec::with_capacity(borders.len());
    let mut min_poi_dist = Vec::with_capacity(borders.len());
    for &src in &nodes {
        let tree = d.cell_search(graph, src, in_cell, |_| {});
        let arc = |to: CellNode| {
            tree.get(&to).map(|(c, _)| CellArc { cost: c.clone(), vertices: trace(&tree, to) })
        };
        to_border.push(nodes.iter().map(|&b| if b == src { None } else { arc(b) }).collect());
        to_gen.push(arc(CellNode::V(gen)));
        let is_border = |n: CellNode| nodes.binary_search(&n).is_ok();
        min_border_dist.push(cell_lengths(d, graph, gen, src, is_border));
        min_poi_dist.push(if src == CellNode::V(gen) {
            Some(0)
        } else {
            cell_lengths(d, graph, gen, src, |n| n == CellNode::V(gen))
        });
    }
    VoronoiCell {
        generator: gen,
        vertices,
        borders,
        adjacent: Vec::new(),
        to_border,
        to_gen,
        min_border_dist,
        min_poi_dist,
    }
}
