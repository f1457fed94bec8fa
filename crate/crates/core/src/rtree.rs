//! Euclidean baseline: POIs in a bulk-loaded rectangle tree, enumerated by
//! straight-line distance, each verified by its own safest-path search.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dijkstra::shortest_distances;
use crate::error::{domain, Result};
use crate::graph::{RoadGraph, VertexId};
use crate::ine::safest_valid_path;
use crate::persist;
use crate::query::{Answer, QueryOutput, QuerySpec, SearchOptions, Tally};

const MAGIC: &[u8; 8] = b"KSNN-RT ";

/// Maximum entries per node.
pub const FANOUT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: (f64, f64),
    pub max: (f64, f64),
}

impl Rect {
    fn point(p: (f64, f64)) -> Rect {
        Rect { min: p, max: p }
    }

    fn union(&self, o: &Rect) -> Rect {
        Rect {
            min: (self.min.0.min(o.min.0), self.min.1.min(o.min.1)),
            max: (self.max.0.max(o.max.0), self.max.1.max(o.max.1)),
        }
    }

    /// Smallest Euclidean distance from `p` to the rectangle.
    pub fn min_dist(&self, p: (f64, f64)) -> f64 {
        let dx = (self.min.0 - p.0).max(0.0).max(p.0 - self.max.0);
        let dy = (self.min.1 - p.1).max(0.0).max(p.1 - self.max.1);
        (dx * dx + dy * dy).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
enum Children {
    Leaves(Vec<(VertexId, (f64, f64))>),
    Nodes(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Node {
    rect: Rect,
    children: Children,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoiSpatialIndex {
    nodes: Vec<Node>,
    root: Option<usize>,
    len: usize,
}

/// Sort-tile-recursive packing of `items` into groups of at most `FANOUT`.
fn str_groups<T: Clone>(mut items: Vec<T>, at: impl Fn(&T) -> (f64, f64)) -> Vec<Vec<T>> {
    let groups = items.len().div_ceil(FANOUT);
    let slices = (groups as f64).sqrt().ceil().max(1.0) as usize;
    let per_slice = slices * FANOUT;
    items.sort_by(|a, b| at(a).0.total_cmp(&at(b).0));
    let mut out = Vec::with_capacity(groups);
    for slice in items.chunks(per_slice) {
        let mut slice = slice.to_vec();
        slice.sort_by(|a, b| at(a).1.total_cmp(&at(b).1));
        out.extend(slice.chunks(FANOUT).map(|c| c.to_vec()));
    }
    out
}

impl PoiSpatialIndex {
    pub fn build(graph: &RoadGraph) -> Result<PoiSpatialIndex> {
        let Some(xy) = graph.coords() else {
            return domain("the Euclidean baseline needs vertex coordinates");
        };
        let mut idx = PoiSpatialIndex { nodes: Vec::new(), root: None, len: graph.pois().len() };
        if graph.pois().is_empty() {
            return Ok(idx);
        }
        let points: Vec<(VertexId, (f64, f64))> = graph.pois().iter().map(|&p| (p, xy[p as usize])).collect();
        let mut level: Vec<usize> = str_groups(points, |e| e.1)
            .into_iter()
            .map(|g| {
                let rect = g.iter().skip(1).fold(Rect::point(g[0].1), |r, e| r.union(&Rect::point(e.1)));
                idx.nodes.push(Node { rect, children: Children::Leaves(g) });
                idx.nodes.len() - 1
            })
            .collect();
        while level.len() > 1 {
            let centre = |i: &usize| {
                let r = idx.nodes[*i].rect;
                ((r.min.0 + r.max.0) / 2.0, (r.min.1 + r.max.1) / 2.0)
            };
            let groups = str_groups(level, centre);
            level = groups
                .into_iter()
                .map(|g| {
                    let rect = g.iter().skip(1).fold(idx.nodes[g[0]].rect, |r, &i| r.union(&idx.nodes[i].rect));
                    idx.nodes.push(Node { rect, children: Children::Nodes(g) });
                    idx.nodes.len() - 1
                })
                .collect();
        }
        idx.root = level.first().copied();
        Ok(idx)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// POIs in ascending Euclidean distance from `p`, ties by vertex id.
    pub fn nearest(&self, p: (f64, f64)) -> NearestIter<'_> {
        let mut heap = BinaryHeap::new();
        if let Some(r) = self.root {
            heap.push(Item { dist: self.nodes[r].rect.min_dist(p), kind: ItemKind::Node(r) });
        }
        NearestIter { idx: self, p, heap }
    }

    pub fn save(&self, path: &Path, graph: &RoadGraph) -> Result<()> {
        persist::save(path, MAGIC, &graph.content_hash(), self)
    }

    pub fn load(path: &Path, graph: &RoadGraph) -> Result<PoiSpatialIndex> {
        persist::load(path, MAGIC, &graph.content_hash())
    }

    pub fn is_index_file(path: &Path) -> Result<bool> {
        Ok(&persist::peek_magic(path)? == MAGIC)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum ItemKind {
    Node(usize),
    Poi(VertexId),
}

#[derive(Debug, PartialEq)]
struct Item {
    dist: f64,
    kind: ItemKind,
}

impl Eq for Item {}

impl Ord for Item {
    // Reversed for a min-heap; nodes before POIs at equal distance so that
    // every POI at that distance is queued before any is reported.
    fn cmp(&self, o: &Self) -> Ordering {
        let rank = |k: &ItemKind| match *k {
            ItemKind::Node(i) => (0, i as u64),
            ItemKind::Poi(v) => (1, v as u64),
        };
        o.dist.total_cmp(&self.dist).then_with(|| rank(&o.kind).cmp(&rank(&self.kind)))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Best-first incremental nearest-neighbour enumeration.
pub struct NearestIter<'a> {
    idx: &'a PoiSpatialIndex,
    p: (f64, f64),
    heap: BinaryHeap<Item>,
}

impl Iterator for NearestIter<'_> {
    type Item = (VertexId, f64);

    fn next(&mut self) -> Option<(VertexId, f64)> {
        while let Some(Item { dist, kind }) = self.heap.pop() {
            match kind {
                ItemKind::Poi(v) => return Some((v, dist)),
                ItemKind::Node(i) => match &self.idx.nodes[i].children {
                    Children::Leaves(pts) => {
                        for &(v, q) in pts {
                            let d = Rect::point(q).min_dist(self.p);
                            self.heap.push(Item { dist: d, kind: ItemKind::Poi(v) });
                        }
                    }
                    Children::Nodes(ch) => {
                        for &c in ch {
                            let d = self.idx.nodes[c].rect.min_dist(self.p);
                            self.heap.push(Item { dist: d, kind: ItemKind::Node(c) });
                        }
                    }
                },
            }
        }
        None
    }
}

pub fn rtree_ksnn(graph: &RoadGraph, index: &PoiSpatialIndex, q: &QuerySpec) -> Result<QueryOutput> {
    rtree_ksnn_with(graph, index, q, &SearchOptions::default())
}

/// Runs one safest-valid-path search per POI whose straight-line distance
/// is below `d_c`; the pruning rule selection does not apply.
pub fn rtree_ksnn_with(
    graph: &RoadGraph,
    index: &PoiSpatialIndex,
    q: &QuerySpec,
    opts: &SearchOptions,
) -> Result<QueryOutput> {
    q.validate(graph)?;
    let Some(xy) = graph.coords() else {
        return domain("the Euclidean baseline needs vertex coordinates");
    };
    let mut tally = Tally::new(graph.vertex_count(), opts.max_paths);
    // A candidate with no path shorter than d_c would make its safest-path
    // search exhaust every valid path, so reachability is settled first.
    let (reach, _) = shortest_distances(graph, &[q.source], |_, _| true, |v, d| {
        if d >= q.d_c {
            return true;
        }
        tally.touch(v);
        false
    });
    let mut found = Vec::new();
    for (poi, dist) in index.nearest(xy[q.source as usize]) {
        if dist >= q.d_c as f64 {
            break;
        }
        if reach[poi as usize] >= q.d_c {
            continue;
        }
        tally.counters.candidate_searches += 1;
        if let Some((cost, path)) = safest_valid_path(graph, q.source, poi, q.d_c, &mut tally)? {
            found.push((poi, cost, path));
        }
    }
    Ok(QueryOutput { answer: Answer::from_candidates(found, q.k, q.d_c)?, counters: tally.counters })
}
