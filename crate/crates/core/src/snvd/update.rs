use std::collections::{BTreeSet, HashSet};

use super::labels::{self, Cand, Label};
use super::{BorderPoint, EdgeCell, Snvd, SCALE};
use crate::ct::EdgeChange;
use crate::error::Result;
use crate::graph::{edge_tie, EdgeKey, RoadGraph, VertexId};
use crate::safety::PathCost;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnvdChange {
    Edge(EdgeChange),
    Poi { v: VertexId, add: bool },
}

impl Snvd {
    /// Applies `change` to `graph` and repairs the diagram. Labels that may
    /// have depended on the change are cleared and recomputed from their
    /// neighbours; only the cells whose vertices or edges moved are rebuilt.
    pub fn update(&mut self, graph: &mut RoadGraph, change: SnvdChange) -> Result<()> {
        let before = self.labels.clone();
        let mut cleared: Vec<VertexId> = Vec::new();
        let mut seeds: Vec<Cand> = Vec::new();
        let mut touched_edges: BTreeSet<EdgeKey> = BTreeSet::new();
        let mut gens: BTreeSet<VertexId> = BTreeSet::new();

        match change {
            SnvdChange::Edge(ec) => {
                let (x, y) = ec.endpoints();
                let key = EdgeKey::new(x, y);
                if let Some(&c) = self.edge_cells.get(&key) {
                    gens.extend(cells_of(c));
                }
                ec.apply(graph)?;
                if !matches!(ec, EdgeChange::Add(_)) {
                    for (a, b) in [(x, y), (y, x)] {
                        if self.label(b).is_some_and(|l| l.pred == Some(a)) {
                            cleared.extend(self.subtree(graph, b));
                        }
                    }
                }
                touched_edges.insert(key);
                for (a, b) in [(x, y), (y, x)] {
                    if let (Some(la), Some(inc)) = (self.label(a), graph.edge(a, b)) {
                        seeds.push(Cand { vertex: b, label: step(la, a, inc.ess, inc.length, inc.key()) });
                    }
                }
            }
            SnvdChange::Poi { v, add } => {
                if add {
                    graph.add_poi(v)?;
                    seeds.push(Cand {
                        vertex: v,
                        label: Label { gen: v, cost: PathCost::zero(graph.s_max()), pred: None },
                    });
                } else {
                    graph.remove_poi(v)?;
                    cleared.extend(self.subtree(graph, v));
                }
                gens.insert(v);
            }
        }

        let cleared_set: HashSet<VertexId> = cleared.iter().copied().collect();
        for &w in &cleared {
            self.labels[w as usize] = None;
        }
        for &w in &cleared {
            for inc in graph.neighbors(w) {
                if let Some(l) = self.label(inc.to) {
                    let e = graph.edge(inc.to, w).expect("incident edge");
                    seeds.push(Cand { vertex: w, label: step(l, inc.to, e.ess, e.length, e.key()) });
                }
            }
        }
        let mut changed: HashSet<VertexId> = cleared_set;
        changed.extend(labels::propagate(graph, &mut self.labels, seeds));

        for &w in &changed {
            for l in [&before[w as usize], &self.labels[w as usize]].into_iter().flatten() {
                gens.insert(l.gen);
            }
            for inc in graph.neighbors(w) {
                touched_edges.insert(EdgeKey::new(w, inc.to));
            }
        }
        // Endpoints of re-evaluated edges may gain or lose border status,
        // which changes the border lists of every cell they touch.
        let mut ends: BTreeSet<VertexId> = BTreeSet::new();
        for key in &touched_edges {
            ends.extend([key.u, key.v]);
        }
        for &w in &ends {
            gens.extend(self.border_cells(BorderPoint::Vertex(w)).iter().copied());
            gens.extend(before[w as usize].as_ref().map(|l| l.gen));
        }
        for key in touched_edges {
            if let Some(old) = self.edge_cells.remove(&key) {
                gens.extend(cells_of(old));
            }
            if graph.edge(key.u, key.v).is_none() {
                continue;
            }
            if let Some(c) = labels::edge_cell(graph, &self.labels, key)? {
                gens.extend(cells_of(c));
                self.edge_cells.insert(key, c);
            }
        }

        for &w in &ends {
            gens.extend(self.vertex_cells(graph, w));
        }
        let live: Vec<VertexId> = gens.iter().copied().filter(|&g| graph.is_poi(g)).collect();
        for g in gens.iter().filter(|&&g| !graph.is_poi(g)) {
            self.cells.remove(g);
        }
        self.rebuild_cells(graph, &live);
        Ok(())
    }

    /// Vertices whose label path runs through `root`, including `root`.
    fn subtree(&self, graph: &RoadGraph, root: VertexId) -> Vec<VertexId> {
        let mut out = vec![root];
        let mut i = 0;
        while i < out.len() {
            let w = out[i];
            for inc in graph.neighbors(w) {
                if self.label(inc.to).is_some_and(|l| l.pred == Some(w)) {
                    out.push(inc.to);
                }
            }
            i += 1;
        }
        out
    }
}

fn step(from: &Label, via: VertexId, ess: u32, length: u32, key: EdgeKey) -> Label {
    Label {
        gen: from.gen,
        cost: from.cost.with_edge(ess, length as u64 * SCALE, edge_tie(key)),
        pred: Some(via),
    }
}

fn cells_of(c: EdgeCell) -> Vec<VertexId> {
    match c {
        EdgeCell::Whole(g) => vec![g],
        EdgeCell::Split { u_gen, v_gen, .. } => vec![u_gen, v_gen],
    }
}
