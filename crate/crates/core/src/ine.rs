//! Index-free search: best-first expansion of valid simple paths in safety
//! order from the query vertex.

use std::collections::BinaryHeap;

use crate::error::Result;
use crate::graph::{RoadGraph, VertexId};
use crate::path::{Entry, PathArena, NO_PARENT};
use crate::query::{Answer, QueryOutput, QuerySpec, Rules, SearchOptions, Tally};
use crate::safety::PathCost;

pub const INE_RULES: [u8; 2] = [1, 2];

/// Shortest dequeued length per vertex, initialized to `d_c`.
#[derive(Clone, Debug)]
pub struct ShortestSeen {
    d: Vec<u64>,
}

impl ShortestSeen {
    pub fn new(vertex_count: usize, d_c: u64) -> Self {
        ShortestSeen { d: vec![d_c; vertex_count] }
    }

    pub fn get(&self, v: VertexId) -> u64 {
        self.d[v as usize]
    }

    /// Lowers the entry for `v`; returns true if it changed.
    pub fn observe(&mut self, v: VertexId, len: u64) -> bool {
        let slot = &mut self.d[v as usize];
        if len < *slot {
            *slot = len;
            true
        } else {
            false
        }
    }
}

/// Pruning Rules 1 and 2: a candidate path survives iff it is shorter than
/// `d_c` and shorter than every path to its tail dequeued so far.
pub fn admit(length: u64, tail: VertexId, seen: &ShortestSeen, d_c: u64, rules: Rules) -> bool {
    if rules.enabled(1) && length >= d_c {
        return false;
    }
    if rules.enabled(2) && length >= seen.get(tail) {
        return false;
    }
    true
}

pub fn ine_ksnn(graph: &RoadGraph, q: &QuerySpec) -> Result<QueryOutput> {
    ine_ksnn_with(graph, q, &SearchOptions::default())
}

pub fn ine_ksnn_with(graph: &RoadGraph, q: &QuerySpec, opts: &SearchOptions) -> Result<QueryOutput> {
    q.validate(graph)?;
    let rules = opts.rules.restrict(&INE_RULES);
    let mut tally = Tally::new(graph.vertex_count(), opts.max_paths);
    let mut seen = ShortestSeen::new(graph.vertex_count(), q.d_c);
    let mut arena = PathArena::default();
    let mut heap = BinaryHeap::new();
    let mut answered = vec![false; graph.vertex_count()];
    let mut found = Vec::new();

    tally.touch(q.source);
    let root = arena.push(q.source, NO_PARENT, 0);
    heap.push(Entry { cost: PathCost::zero(graph.s_max()), len: 0, tail: q.source, node: root });

    while let Some(Entry { cost, len, tail, node }) = heap.pop() {
        seen.observe(tail, len);
        if graph.is_poi(tail) && !answered[tail as usize] && len < q.d_c {
            answered[tail as usize] = true;
            found.push((tail, cost.clone(), arena.vertices(node)));
            if found.len() == q.k {
                break;
            }
        }
        for inc in graph.neighbors(tail) {
            let next_len = len + inc.length as u64;
            if !admit(next_len, inc.to, &seen, q.d_c, rules) {
                continue;
            }
            // Rule 2 already rejects any path that revisits one of its vertices.
            if !rules.enabled(2) && arena.contains(node, inc.to) {
                continue;
            }
            tally.admit(inc.to)?;
            let child = arena.push(inc.to, node, 0);
            heap.push(Entry {
                cost: cost.with_edge(inc.ess, inc.length as u64, inc.tie),
                len: next_len,
                tail: inc.to,
                node: child,
            });
        }
    }
    Ok(QueryOutput { answer: Answer::from_candidates(found, q.k, q.d_c)?, counters: tally.counters })
}

/// Safest valid path from `source` to a single `target`, using Rules 1 and 2.
/// Returns the path cost, its vertices, and the number of admitted paths.
pub(crate) fn safest_valid_path(
    graph: &RoadGraph,
    source: VertexId,
    target: VertexId,
    d_c: u64,
    tally: &mut Tally,
) -> Result<Option<(PathCost, Vec<VertexId>)>> {
    let mut seen = ShortestSeen::new(graph.vertex_count(), d_c);
    let mut arena = PathArena::default();
    let mut heap = BinaryHeap::new();
    tally.touch(source);
    let root = arena.push(source, NO_PARENT, 0);
    heap.push(Entry { cost: PathCost::zero(graph.s_max()), len: 0, tail: source, node: root });
    while let Some(Entry { cost, len, tail, node }) = heap.pop() {
        seen.observe(tail, len);
        if tail == target {
            return Ok(Some((cost, arena.vertices(node))));
        }
        for inc in graph.neighbors(tail) {
            let next_len = len + inc.length as u64;
            if !admit(next_len, inc.to, &seen, d_c, Rules::only(&INE_RULES)) {
                continue;
            }
            tally.admit(inc.to)?;
            let child = arena.push(inc.to, node, 0);
            heap.push(Entry {
                cost: cost.with_edge(inc.ess, inc.length as u64, inc.tie),
                len: next_len,
                tail: inc.to,
                node: child,
            });
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn admit_boundaries() {
        let mut seen = ShortestSeen::new(3, 10);
        assert!(!admit(10, 1, &seen, 10, Rules::all()));
        assert!(admit(9, 1, &seen, 10, Rules::all()));
        seen.observe(1, 4);
        assert!(!admit(5, 1, &seen, 10, Rules::all()));
        assert!(admit(5, 1, &seen, 10, Rules::only(&[1])));
        assert!(admit(10, 1, &seen, 10, Rules::none()));
    }

    #[test]
    fn source_is_the_only_poi() {
        let g = RoadGraph::from_edges(2, 2, [Edge::new(0, 1, 1, 1)], [0]).unwrap();
        let out = ine_ksnn(&g, &QuerySpec::new(0, 3, 5)).unwrap();
        assert_eq!(out.answer.len(), 1);
        let e = &out.answer.entries[0];
        assert_eq!((e.poi, e.length, e.path.clone()), (0, 0, vec![0]));
        assert_eq!(e.pss.to_string(), "inf");
    }

    #[test]
    fn detour_beats_unsafe_shortcut() {
        // 0-1 direct but unsafe, 0-2-1 longer and safe.
        let g = RoadGraph::from_edges(
            3,
            3,
            [Edge::new(0, 1, 1, 1), Edge::new(0, 2, 2, 3), Edge::new(2, 1, 2, 3)],
            [1],
        )
        .unwrap();
        let a = ine_ksnn(&g, &QuerySpec::new(0, 1, 5)).unwrap().answer;
        assert_eq!(a.entries[0].path, vec![0, 2, 1]);
        let a = ine_ksnn(&g, &QuerySpec::new(0, 1, 4)).unwrap().answer;
        assert_eq!(a.entries[0].path, vec![0, 1]);
    }
}
