use std::collections::{BinaryHeap, HashMap};
use std::mem;

use super::{CtTree, NodeId};
use crate::error::Result;
use crate::graph::{RoadGraph, VertexId};
use crate::ine::{admit, ShortestSeen};
use crate::path::{Entry, PathArena, NO_PARENT};
use crate::query::{Answer, QueryOutput, QuerySpec, SearchOptions, Tally};
use crate::safety::PathCost;

pub const CT_RULES: [u8; 4] = [1, 2, 3, 4];

/// `aux` value of a path that may use every edge of the current node.
const UNRESTRICTED: u32 = u32::MAX;

/// Pruning Rules 3 and 4 at a border: the path cannot reach another border
/// of the node within `d_c`, and cannot reach any of its POIs with a length
/// below `max_d`. `None` distances are unreachable.
pub fn border_prune(
    dist: u64,
    min_border_dist: Option<u64>,
    min_poi_dist: Option<u64>,
    d_c: u64,
    max_d: u64,
) -> bool {
    let no_border = min_border_dist.is_none_or(|d| dist + d >= d_c);
    let no_poi = min_poi_dist.is_none_or(|d| dist + d >= max_d);
    no_border && no_poi
}

/// Per-query cache of `maxD` per node.
struct MaxD {
    cache: HashMap<NodeId, u64>,
}

impl MaxD {
    fn get(&mut self, tree: &CtTree, seen: &ShortestSeen, id: NodeId, d_c: u64) -> u64 {
        *self.cache.entry(id).or_insert_with(|| {
            tree.node(id).pois.iter().map(|&p| seen.get(p)).max().unwrap_or(d_c)
        })
    }

    fn invalidate(&mut self, tree: &CtTree, poi: VertexId) {
        for id in tree.locator(poi) {
            self.cache.remove(id);
        }
    }
}

impl CtTree {
    pub fn ksnn(&self, graph: &RoadGraph, q: &QuerySpec) -> Result<QueryOutput> {
        self.ksnn_with(graph, q, &SearchOptions::default())
    }

    /// Search that starts inside the deepest component holding `k` POIs and
    /// widens to the parent component whenever the current one is exhausted.
    ///
    /// A path whose tail is a border of node `M` and that passes the border
    /// test can no longer gain anything inside `M`; it is kept, but may only
    /// leave `M` through edges with ESS at most `M`'s floor. Paths parked for
    /// the parent phase carry the same restriction, so the edges they already
    /// explored are not expanded twice.
    pub fn ksnn_with(&self, graph: &RoadGraph, q: &QuerySpec, opts: &SearchOptions) -> Result<QueryOutput> {
        q.validate(graph)?;
        let rules = opts.rules.restrict(&CT_RULES);
        let border_rules = rules.enabled(3) || rules.enabled(4);
        let mut tally = Tally::new(graph.vertex_count(), opts.max_paths);
        let mut seen = ShortestSeen::new(graph.vertex_count(), q.d_c);
        let mut max_d = MaxD { cache: HashMap::new() };
        let mut arena = PathArena::default();
        let mut q_cur = BinaryHeap::new();
        let mut q_next = BinaryHeap::new();
        let mut answered = vec![false; graph.vertex_count()];
        let mut found = Vec::new();

        let mut cur = self.locate_start(q.source, q.k);
        tally.touch(q.source);
        let root = arena.push(q.source, NO_PARENT, UNRESTRICTED);
        q_cur.push(Entry { cost: PathCost::zero(graph.s_max()), len: 0, tail: q.source, node: root });

        'phases: loop {
            let floor = self.node(cur).floor;
            while let Some(e) = q_cur.pop() {
                let Entry { ref cost, len, tail, node } = e;
                if seen.observe(tail, len) && graph.is_poi(tail) {
                    max_d.invalidate(self, tail);
                }
                if graph.is_poi(tail) && !answered[tail as usize] && len < q.d_c {
                    answered[tail as usize] = true;
                    found.push((tail, cost.clone(), arena.vertices(node)));
                    if found.len() == q.k {
                        break 'phases;
                    }
                }
                let limit = arena.get(node).aux;
                for inc in graph.neighbors(tail) {
                    if inc.ess <= floor || inc.ess > limit {
                        continue;
                    }
                    let next_len = len + inc.length as u64;
                    if !admit(next_len, inc.to, &seen, q.d_c, rules) {
                        continue;
                    }
                    if !rules.enabled(2) && arena.contains(node, inc.to) {
                        continue;
                    }
                    let cost = cost.with_edge(inc.ess, inc.length as u64, inc.tie);
                    let mut aux = UNRESTRICTED;
                    let mut park = false;
                    if border_rules {
                        if let Some(m) = self.check_border(inc.to, cur) {
                            let meta = self.node(m).border(inc.to).expect("border metadata");
                            let bound =
                                if rules.enabled(4) { max_d.get(self, &seen, m, q.d_c) } else { q.d_c };
                            if border_prune(next_len, meta.min_border_dist, meta.min_poi_dist, q.d_c, bound) {
                                aux = self.node(m).floor;
                                park = m == cur;
                            }
                        }
                    }
                    tally.admit(inc.to)?;
                    let child = arena.push(inc.to, node, aux);
                    let entry = Entry { cost, len: next_len, tail: inc.to, node: child };
                    if park {
                        q_next.push(entry);
                    } else {
                        q_cur.push(entry);
                    }
                }
                if self.node(cur).parent.is_some() && self.is_border(tail, cur) {
                    let n = arena.get(node);
                    let parked = if n.aux <= floor { node } else { arena.push(tail, n.parent, floor) };
                    q_next.push(Entry { node: parked, ..e });
                }
            }
            match self.node(cur).parent {
                Some(p) => {
                    cur = p;
                    q_cur = mem::take(&mut q_next);
                }
                None => break,
            }
        }
        Ok(QueryOutput { answer: Answer::from_candidates(found, q.k, q.d_c)?, counters: tally.counters })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn border_test_examples() {
        assert!(border_prune(10, Some(11), Some(13), 20, 20));
        assert!(border_prune(10, Some(15), Some(8), 20, 16));
        assert!(!border_prune(10, Some(15), Some(8), 20, 20));
        assert!(border_prune(10, None, None, 20, 20));
        assert!(!border_prune(10, Some(9), None, 20, 20));
    }
}
