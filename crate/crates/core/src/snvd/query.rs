use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use super::cell::{trace, CellNode};
use super::{unscale, BorderPoint, EdgeCell, Snvd, SCALE};
use crate::error::Result;
use crate::graph::{EdgeKey, RoadGraph, VertexId};
use crate::ine::{admit, ShortestSeen};
use crate::path::{Entry, PathArena, NO_PARENT};
use crate::query::{Answer, QueryOutput, QuerySpec, Rules, SearchOptions, Tally};
use crate::safety::PathCost;

pub const SNVD_RULES: [u8; 5] = [1, 2, 5, 6, 7];

/// An unconstrained safest neighbor, in original length units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Usn {
    pub poi: VertexId,
    pub cost: PathCost,
    pub path: Vec<VertexId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum BgNode {
    Border(BorderPoint),
    Gen(VertexId),
}

#[derive(Clone, Debug)]
enum Pred {
    Source(Vec<VertexId>),
    /// Arc of `cell` from border `from_idx` of that cell to border `to_idx`,
    /// or to the generator when `to_idx` is `None`.
    Arc { from: usize, cell: VertexId, from_idx: usize, to_idx: Option<usize> },
}

/// Emits POIs in order of their unconstrained safest path from a source.
/// The first comes from a search inside the source's own cells; later ones
/// from a search over precomputed in-cell arcs that grows by the neighbors
/// of every emitted cell.
pub struct UsnStream<'a> {
    d: &'a Snvd,
    explored: HashSet<VertexId>,
    nodes: Vec<BgNode>,
    index: HashMap<BgNode, usize>,
    label: Vec<Option<(PathCost, Pred)>>,
    heap: BinaryHeap<Reverse<(PathCost, usize)>>,
    emitted: HashSet<VertexId>,
    pending: Option<VertexId>,
    settled: Vec<VertexId>,
}

impl<'a> UsnStream<'a> {
    pub fn new(d: &'a Snvd, graph: &RoadGraph, source: VertexId) -> Self {
        let mut s = UsnStream {
            d,
            explored: HashSet::new(),
            nodes: Vec::new(),
            index: HashMap::new(),
            label: Vec::new(),
            heap: BinaryHeap::new(),
            emitted: HashSet::new(),
            pending: None,
            settled: Vec::new(),
        };
        if d.label(source).is_none() {
            return s;
        }
        let start = d.vertex_cells(graph, source);
        s.explored.extend(start.iter().copied());
        let mut settled = Vec::new();
        let tree = d.cell_search(graph, CellNode::V(source), |g| start.contains(&g), |n| {
            if let CellNode::V(v) = n {
                settled.push(v);
            }
        });
        s.settled = settled;
        for &g in &start {
            let cell = d.cell(g).expect("cell of a labelled vertex");
            let targets = cell
                .borders
                .iter()
                .map(|&b| (BgNode::Border(b), CellNode::from(b)))
                .chain(std::iter::once((BgNode::Gen(g), CellNode::V(g))));
            for (bg, cn) in targets {
                if let Some((cost, _)) = tree.get(&cn) {
                    s.relax(bg, cost.clone(), Pred::Source(trace(&tree, cn)));
                }
            }
        }
        s
    }

    /// Vertices settled by the search inside the source's cells.
    pub fn settled_vertices(&self) -> &[VertexId] {
        &self.settled
    }

    fn node(&mut self, n: BgNode) -> usize {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        self.nodes.push(n);
        self.label.push(None);
        self.index.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn relax(&mut self, n: BgNode, cost: PathCost, pred: Pred) {
        let i = self.node(n);
        if self.label[i].as_ref().is_none_or(|(c, _)| cost < *c) {
            self.heap.push(Reverse((cost.clone(), i)));
            self.label[i] = Some((cost, pred));
        }
    }

    fn relax_from(&mut self, from: usize, gen: VertexId) {
        let BgNode::Border(b) = self.nodes[from] else { return };
        let cell = self.d.cell(gen).expect("explored cell exists");
        let Some(i) = cell.border_index(b) else { return };
        let base = self.label[from].as_ref().expect("labelled node").0.clone();
        for (j, arc) in cell.to_border[i].iter().enumerate() {
            if let Some(arc) = arc {
                let pred = Pred::Arc { from, cell: gen, from_idx: i, to_idx: Some(j) };
                self.relax(BgNode::Border(cell.borders[j]), base.concat(&arc.cost), pred);
            }
        }
        if let Some(arc) = &cell.to_gen[i] {
            let pred = Pred::Arc { from, cell: gen, from_idx: i, to_idx: None };
            self.relax(BgNode::Gen(gen), base.concat(&arc.cost), pred);
        }
    }

    fn explore(&mut self, gen: VertexId) {
        if !self.explored.insert(gen) {
            return;
        }
        let cell = self.d.cell(gen).expect("adjacent cell exists");
        for &b in &cell.borders {
            if let Some(&i) = self.index.get(&BgNode::Border(b)) {
                if self.label[i].is_some() {
                    self.relax_from(i, gen);
                }
            }
        }
    }

    fn path(&self, mut i: usize) -> Vec<VertexId> {
        let mut parts: Vec<&[VertexId]> = Vec::new();
        loop {
            match &self.label[i].as_ref().expect("labelled node").1 {
                Pred::Source(p) => {
                    parts.push(p);
                    break;
                }
                Pred::Arc { from, cell, from_idx, to_idx } => {
                    let c = self.d.cell(*cell).expect("cell exists");
                    let arc = match to_idx {
                        Some(j) => c.to_border[*from_idx][*j].as_ref(),
                        None => c.to_gen[*from_idx].as_ref(),
                    };
                    parts.push(&arc.expect("arc exists").vertices);
                    i = *from;
                }
            }
        }
        let mut out: Vec<VertexId> = Vec::new();
        for part in parts.into_iter().rev() {
            let skip = usize::from(!part.is_empty() && out.last() == part.first());
            out.extend_from_slice(&part[skip..]);
        }
        out
    }
}

impl Iterator for UsnStream<'_> {
    type Item = Usn;

    fn next(&mut self) -> Option<Usn> {
        if let Some(g) = self.pending.take() {
            let adjacent = self.d.cell(g).expect("emitted cell exists").adjacent.clone();
            for a in adjacent {
                self.explore(a);
            }
        }
        while let Some(Reverse((cost, i))) = self.heap.pop() {
            if self.label[i].as_ref().is_some_and(|(c, _)| *c != cost) {
                continue;
            }
            match self.nodes[i] {
                BgNode::Gen(g) => {
                    if !self.emitted.insert(g) {
                        continue;
                    }
                    self.pending = Some(g);
                    return Some(Usn { poi: g, cost: unscale(&cost), path: self.path(i) });
                }
                BgNode::Border(b) => {
                    let cells: Vec<VertexId> = self
                        .d
                        .border_cells(b)
                        .iter()
                        .copied()
                        .filter(|g| self.explored.contains(g))
                        .collect();
                    for g in cells {
                        self.relax_from(i, g);
                    }
                }
            }
        }
        None
    }
}

impl Snvd {
    pub fn ksnn(&self, graph: &RoadGraph, q: &QuerySpec) -> Result<QueryOutput> {
        self.ksnn_with(graph, q, &SearchOptions::default())
    }

    /// Takes unconstrained safest neighbors in order until `k` of them have a
    /// valid unconstrained path; those paths are final. POIs ranked before the
    /// `k`-th valid one whose unconstrained path is too long get a constrained
    /// search.
    pub fn ksnn_with(&self, graph: &RoadGraph, q: &QuerySpec, opts: &SearchOptions) -> Result<QueryOutput> {
        q.validate(graph)?;
        let rules = opts.rules.restrict(&SNVD_RULES);
        let mut tally = Tally::new(graph.vertex_count(), opts.max_paths);
        let mut stream = UsnStream::new(self, graph, q.source);
        for &v in stream.settled_vertices() {
            tally.note(v);
        }
        let mut valid = Vec::new();
        let mut invalid = Vec::new();
        while valid.len() < q.k {
            match stream.next() {
                Some(u) if u.cost.length() < q.d_c => valid.push((u.poi, u.cost, u.path)),
                Some(u) => invalid.push(u.poi),
                None => break,
            }
        }
        let mut found = valid;
        if !invalid.is_empty() {
            let extra = self.find_a(graph, q, &invalid, &found, rules, &mut tally)?;
            found.extend(extra);
        }
        Ok(QueryOutput { answer: Answer::from_candidates(found, q.k, q.d_c)?, counters: tally.counters })
    }

    /// True if a path at border `b` with scaled length `dist` gains nothing
    /// by entering cell `gen` (Pruning Rules 5 and 6).
    fn cell_closed(&self, b: BorderPoint, gen: VertexId, dist: u64, d_c: u64, target: bool, rules: Rules) -> bool {
        let Some(cell) = self.cell(gen) else { return false };
        let Some(i) = cell.border_index(b) else { return false };
        let limit = d_c * SCALE;
        let no_border = cell.min_border_dist[i].is_none_or(|d| dist + d >= limit);
        if target {
            rules.enabled(6) && no_border && cell.min_poi_dist[i].is_none_or(|d| dist + d >= limit)
        } else {
            rules.enabled(5) && no_border
        }
    }

    /// Joint constrained search for the safest valid paths to `targets`.
    fn find_a(
        &self,
        graph: &RoadGraph,
        q: &QuerySpec,
        targets: &[VertexId],
        known: &[(VertexId, PathCost, Vec<VertexId>)],
        rules: Rules,
        tally: &mut Tally,
    ) -> Result<Vec<(VertexId, PathCost, Vec<VertexId>)>> {
        let is_target: HashSet<VertexId> = targets.iter().copied().collect();
        let mut bounds: Vec<PathCost> = known.iter().map(|c| c.1.clone()).collect();
        bounds.sort();
        let kth = |b: &[PathCost]| if rules.enabled(7) { b.get(q.k - 1).cloned() } else { None };
        let mut s_k = kth(&bounds);

        let mut seen = ShortestSeen::new(graph.vertex_count(), q.d_c);
        let mut arena = PathArena::default();
        let mut closed: Vec<Vec<VertexId>> = Vec::new();
        let mut heap = BinaryHeap::new();
        let mut out = Vec::new();
        let root = arena.push(q.source, NO_PARENT, u32::MAX);
        tally.touch(q.source);
        heap.push(Entry { cost: PathCost::zero(graph.s_max()), len: 0, tail: q.source, node: root });

        while let Some(Entry { cost, len, tail, node }) = heap.pop() {
            if s_k.as_ref().is_some_and(|s| cost > *s) {
                break;
            }
            seen.observe(tail, len);
            if is_target.contains(&tail) && !out.iter().any(|(p, _, _)| *p == tail) && len < q.d_c {
                out.push((tail, cost.clone(), arena.vertices(node)));
                let i = bounds.binary_search(&cost).unwrap_or_else(|i| i);
                bounds.insert(i, cost.clone());
                s_k = kth(&bounds);
                if out.len() == targets.len() {
                    break;
                }
            }
            let aux = arena.get(node).aux;
            for inc in graph.neighbors(tail) {
                let key = EdgeKey::new(tail, inc.to);
                let ec = self.edge_cell(key);
                if aux != u32::MAX {
                    if let Some(ec) = ec {
                        if closed[aux as usize].contains(&ec.side(key, tail)) {
                            continue;
                        }
                    }
                }
                let next_len = len + inc.length as u64;
                if !admit(next_len, inc.to, &seen, q.d_c, rules) {
                    continue;
                }
                if !rules.enabled(2) && arena.contains(node, inc.to) {
                    continue;
                }
                let next_cost = cost.with_edge(inc.ess, inc.length as u64, inc.tie);
                if s_k.as_ref().is_some_and(|s| next_cost > *s) {
                    continue;
                }
                if let Some(EdgeCell::Split { at, .. }) = ec {
                    let part = if tail == key.u { at } else { inc.length as u64 * SCALE - at };
                    let far = ec.expect("split edge").side(key, inc.to);
                    let dist = len * SCALE + part;
                    if self.cell_closed(BorderPoint::Split(key), far, dist, q.d_c, is_target.contains(&far), rules) {
                        continue;
                    }
                }
                let mut next_aux = u32::MAX;
                if rules.enabled(5) || rules.enabled(6) {
                    let cells = self.vertex_cells(graph, inc.to);
                    if cells.len() >= 2 {
                        let b = BorderPoint::Vertex(inc.to);
                        let shut: Vec<VertexId> = cells
                            .iter()
                            .copied()
                            .filter(|&g| {
                                self.cell_closed(b, g, next_len * SCALE, q.d_c, is_target.contains(&g), rules)
                            })
                            .collect();
                        if shut.len() == cells.len() {
                            continue;
                        }
                        if !shut.is_empty() {
                            closed.push(shut);
                            next_aux = (closed.len() - 1) as u32;
                        }
                    }
                }
                tally.admit(inc.to)?;
                let child = arena.push(inc.to, node, next_aux);
                heap.push(Entry { cost: next_cost, len: next_len, tail: inc.to, node: child });
            }
        }
        Ok(out)
    }
}
