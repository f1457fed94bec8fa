//! Multi-source labelling: each vertex gets the POI with its unconstrained
//! safest path, ordered by (cost, generator id).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{deciding_level, split_offset, EdgeCell, SCALE};
use crate::error::Result;
use crate::graph::{EdgeKey, RoadGraph, VertexId};
use crate::safety::PathCost;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Label {
    pub gen: VertexId,
    /// Scaled cost of the path from the vertex to `gen`.
    pub cost: PathCost,
    /// Next vertex towards `gen`; `None` at the generator.
    pub pred: Option<VertexId>,
}

impl Label {
    fn key_cmp(&self, other: &Label) -> Ordering {
        self.cost.cmp(&other.cost).then(self.gen.cmp(&other.gen))
    }
}

pub(super) struct Cand {
    pub vertex: VertexId,
    pub label: Label,
}

impl PartialEq for Cand {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cand {}

impl Ord for Cand {
    fn cmp(&self, other: &Self) -> Ordering {
        other.label.key_cmp(&self.label).then(other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Cand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `true` if `cand` should replace `cur`.
fn improves(cand: &Label, cur: &Option<Label>) -> bool {
    match cur {
        None => true,
        Some(c) => cand.key_cmp(c) == Ordering::Less,
    }
}

pub(super) fn compute(graph: &RoadGraph) -> Vec<Option<Label>> {
    let mut labels = vec![None; graph.vertex_count()];
    let seeds = graph
        .pois()
        .iter()
        .map(|&p| Cand { vertex: p, label: Label { gen: p, cost: PathCost::zero(graph.s_max()), pred: None } })
        .collect();
    propagate(graph, &mut labels, seeds);
    labels
}

/// Label-setting propagation from candidate labels; only strict improvements
/// are accepted. Returns the vertices whose label changed.
pub(super) fn propagate(graph: &RoadGraph, labels: &mut [Option<Label>], seeds: Vec<Cand>) -> Vec<VertexId> {
    let mut heap: BinaryHeap<Cand> = seeds.into_iter().collect();
    let mut changed = Vec::new();
    while let Some(Cand { vertex, label }) = heap.pop() {
        if !improves(&label, &labels[vertex as usize]) {
            continue;
        }
        for inc in graph.neighbors(vertex) {
            let next = Label {
                gen: label.gen,
                cost: label.cost.with_edge(inc.ess, inc.length as u64 * SCALE, inc.tie),
                pred: Some(vertex),
            };
            if improves(&next, &labels[inc.to as usize]) {
                heap.push(Cand { vertex: inc.to, label: next });
            }
        }
        labels[vertex as usize] = Some(label);
        changed.push(vertex);
    }
    changed
}

/// Cell assignment of one edge, `None` when neither endpoint reaches a POI.
pub(super) fn edge_cell(graph: &RoadGraph, labels: &[Option<Label>], key: EdgeKey) -> Result<Option<EdgeCell>> {
    let e = graph.edge(key.u, key.v).expect("edge exists");
    let (Some(lu), Some(lv)) = (&labels[key.u as usize], &labels[key.v as usize]) else {
        return Ok(None);
    };
    if lu.gen == lv.gen {
        return Ok(Some(EdgeCell::Whole(lu.gen)));
    }
    let len = e.length as u64 * SCALE;
    // Identical signatures at both ends balance at the midpoint of the edge.
    let s = deciding_level(&lu.cost.sig, &lv.cost.sig, e.ess)?.unwrap_or(e.ess);
    let at = split_offset(&lu.cost.sig, &lv.cost.sig, len, s);
    Ok(Some(if at == 0 {
        EdgeCell::Whole(lv.gen)
    } else if at == len {
        EdgeCell::Whole(lu.gen)
    } else {
        EdgeCell::Split { at, u_gen: lu.gen, v_gen: lv.gen }
    }))
}
