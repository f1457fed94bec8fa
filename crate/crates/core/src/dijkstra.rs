//! Plain shortest-distance searches on edge length.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{Incidence, RoadGraph, VertexId};

pub const UNREACHED: u64 = u64::MAX;

/// Multi-source shortest distances over the edges accepted by `allow`.
/// Stops early once `stop` returns true for a settled vertex, which is then
/// returned alongside the distances.
pub fn shortest_distances<F, S>(
    graph: &RoadGraph,
    sources: &[VertexId],
    mut allow: F,
    mut stop: S,
) -> (Vec<u64>, Option<VertexId>)
where
    F: FnMut(VertexId, &Incidence) -> bool,
    S: FnMut(VertexId, u64) -> bool,
{
    let mut dist = vec![UNREACHED; graph.vertex_count()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s as usize] = 0;
        heap.push(Reverse((0u64, s)));
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        if stop(v, d) {
            return (dist, Some(v));
        }
        for inc in graph.neighbors(v) {
            if !allow(v, inc) {
                continue;
            }
            let nd = d + inc.length as u64;
            if nd < dist[inc.to as usize] {
                dist[inc.to as usize] = nd;
                heap.push(Reverse((nd, inc.to)));
            }
        }
    }
    (dist, None)
}

/// Network distance from `source` to its `k`-th closest POI, counting a POI
/// at the source. Falls back to the farthest reachable POI when fewer than
/// `k` are reachable; `None` when no POI is reachable.
pub fn kth_poi_distance(graph: &RoadGraph, source: VertexId, k: usize) -> Option<u64> {
    let mut seen = 0;
    let mut last = None;
    shortest_distances(graph, &[source], |_, _| true, |v, d| {
        if graph.is_poi(v) {
            seen += 1;
            last = Some(d);
        }
        seen >= k
    });
    last
}

/// `k` closest POIs by network distance with their shortest paths, ties on
/// distance broken by POI id.
pub fn k_nearest_pois(graph: &RoadGraph, source: VertexId, k: usize) -> Vec<(VertexId, u64, Vec<VertexId>)> {
    let n = graph.vertex_count();
    let mut dist = vec![UNREACHED; n];
    let mut pred = vec![u32::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0;
    heap.push(Reverse((0u64, source)));
    let mut settled = Vec::new();
    let mut cutoff = UNREACHED;
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        if d > cutoff {
            break;
        }
        if graph.is_poi(v) {
            settled.push((v, d));
            if settled.len() >= k && cutoff == UNREACHED {
                cutoff = d;
            }
        }
        for inc in graph.neighbors(v) {
            let nd = d + inc.length as u64;
            // Equal-distance predecessors resolve to the smaller vertex id.
            if nd < dist[inc.to as usize] || (nd == dist[inc.to as usize] && v < pred[inc.to as usize]) {
                if nd < dist[inc.to as usize] {
                    heap.push(Reverse((nd, inc.to)));
                }
                dist[inc.to as usize] = nd;
                pred[inc.to as usize] = v;
            }
        }
    }
    settled.sort_by_key(|&(v, d)| (d, v));
    settled.truncate(k);
    settled
        .into_iter()
        .map(|(p, d)| {
            let mut path = vec![p];
            let mut x = p;
            while x != source {
                x = pred[x as usize];
                path.push(x);
            }
            path.reverse();
            (p, d, path)
        })
        .collect()
}

/// `d_c = ceil(delta * d^k) + 1`, so the `k`-th closest POI stays strictly
/// inside the constraint. Never below 2, the smallest meaningful constraint.
pub fn d_c_from_delta(graph: &RoadGraph, source: VertexId, k: usize, delta: f64) -> u64 {
    let dk = kth_poi_distance(graph, source, k).unwrap_or(0);
    ((delta * dk as f64).ceil() as u64 + 1).max(2)
}
