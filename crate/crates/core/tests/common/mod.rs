#![allow(dead_code)]

use ksnn::ct::{CtTree, EdgeChange};
use ksnn::dijkstra::{shortest_distances, UNREACHED};
use ksnn::snvd::SnvdChange;
use ksnn::{Edge, RoadGraph, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const S: VertexId = 0;
pub const P1: VertexId = 4;
pub const P2: VertexId = 8;
pub const P3: VertexId = 12;

/// Three routes out of `s`, as `(ess, length)` per edge:
/// P1 to p1 `[(4,1),(5,3),(4,3),(5,2)]`, P2 to p2 `[(1,1),(2,1),(4,1),(5,2)]`,
/// P3 to p2 `[(1,1),(2,2),(2,2),(5,4)]`; p3 hangs off p1 beyond reach.
#[allow(clippy::type_complexity)]
pub fn three_routes() -> RoadGraph {
    let routes: [(&[VertexId], &[(u32, u32)]); 3] = [
        (&[0, 1, 2, 3, 4], &[(4, 1), (5, 3), (4, 3), (5, 2)]),
        (&[0, 5, 6, 7, 8], &[(1, 1), (2, 1), (4, 1), (5, 2)]),
        (&[0, 9, 10, 11, 8], &[(1, 1), (2, 2), (2, 2), (5, 4)]),
    ];
    let mut edges = Vec::new();
    for (vs, es) in routes {
        for (w, &(ess, len)) in vs.windows(2).zip(es) {
            edges.push(Edge::new(w[0], w[1], len, ess));
        }
    }
    edges.push(Edge::new(P1, P3, 4, 3));
    let mut g = RoadGraph::from_edges(13, 5, edges, [P1, P2, P3]).unwrap();
    // Any layout with straight-line distances within the edge lengths.
    let mut xy = vec![(0.0, 0.0); 13];
    xy[1] = (1.0, 0.0);
    xy[2] = (3.0, 0.5);
    xy[3] = (5.0, 1.0);
    xy[4] = (6.0, 1.0);
    xy[5] = (0.0, -1.0);
    xy[6] = (0.5, -1.5);
    xy[7] = (1.0, -2.0);
    xy[8] = (2.0, -3.0);
    xy[9] = (-1.0, 0.0);
    xy[10] = (-1.0, -2.0);
    xy[11] = (-0.5, -3.5);
    xy[12] = (9.0, 1.0);
    g.set_coords(xy).unwrap();
    g.check_embedding().unwrap();
    g
}

/// A connected random graph with at most 12 vertices and 20 edges, 2 to 4
/// POIs and `s_max` in `[2, 4]`. Vertices get random planar coordinates and
/// no edge is shorter than the straight line between its endpoints.
pub fn small_graph(rng: &mut ChaCha8Rng) -> RoadGraph {
    let n = rng.gen_range(4..=12usize);
    let s_max = rng.gen_range(2..=4u32);
    let xy: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0))).collect();
    let mut pairs = Vec::new();
    for v in 1..n {
        pairs.push((rng.gen_range(0..v), v));
    }
    let target = rng.gen_range(n - 1..=20.min(n * (n - 1) / 2));
    let mut tries = 0;
    while pairs.len() < target && tries < 200 {
        tries += 1;
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let p = (a.min(b), a.max(b));
        if a != b && !pairs.iter().any(|&(x, y)| (x.min(y), x.max(y)) == p) {
            pairs.push(p);
        }
    }
    let edges: Vec<Edge> = pairs
        .iter()
        .map(|&(a, b)| {
            let line = ((xy[a].0 - xy[b].0).hypot(xy[a].1 - xy[b].1)).ceil() as u32;
            let len = rng.gen_range(1..=5).max(line);
            Edge::new(a as VertexId, b as VertexId, len, rng.gen_range(1..=s_max))
        })
        .collect();
    let mut vs: Vec<VertexId> = (0..n as VertexId).collect();
    vs.shuffle(rng);
    let count = rng.gen_range(2..=4usize).min(n);
    let mut g = RoadGraph::from_edges(n, s_max, edges, vs[..count].to_vec()).unwrap();
    g.set_coords(xy).unwrap();
    g
}

/// A source and a `d_c` under which between 1 and 4 POIs are within reach.
pub fn small_query(rng: &mut ChaCha8Rng, g: &RoadGraph) -> (VertexId, u64) {
    let source = rng.gen_range(0..g.vertex_count() as VertexId);
    let (dist, _) = shortest_distances(g, &[source], |_, _| true, |_, _| false);
    let mut d: Vec<u64> = g.pois().iter().map(|&p| dist[p as usize]).filter(|&x| x != UNREACHED).collect();
    d.sort_unstable();
    let reach = rng.gen_range(1..=d.len().min(4));
    (source, (d[reach - 1] + 1).max(2))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random edge or POI change that keeps at least one POI.
pub fn mutation(rng: &mut ChaCha8Rng, g: &RoadGraph) -> SnvdChange {
    let n = g.vertex_count() as VertexId;
    loop {
        match rng.gen_range(0..5) {
            0 => {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if a != b && g.edge(a, b).is_none() {
                    let e = Edge::new(a, b, rng.gen_range(1..=15), rng.gen_range(1..=g.s_max()));
                    return SnvdChange::Edge(EdgeChange::Add(e));
                }
            }
            1 | 2 => {
                let es: Vec<Edge> = g.edges().collect();
                if es.is_empty() {
                    continue;
                }
                let e = es[rng.gen_range(0..es.len())];
                if rng.gen_bool(0.5) {
                    return SnvdChange::Edge(EdgeChange::Remove { u: e.u, v: e.v });
                }
                return SnvdChange::Edge(EdgeChange::SetEss { u: e.u, v: e.v, ess: rng.gen_range(1..=g.s_max()) });
            }
            _ => {
                let v = rng.gen_range(0..n);
                if !g.is_poi(v) {
                    return SnvdChange::Poi { v, add: true };
                }
                if g.pois().len() > 1 {
                    return SnvdChange::Poi { v, add: false };
                }
            }
        }
    }
}

/// Applies `m` to a Ct-tree and its graph.
pub fn apply_ct(ct: &mut CtTree, g: &mut RoadGraph, m: SnvdChange) {
    match m {
        SnvdChange::Edge(c) => ct.update_edge(g, c).unwrap(),
        SnvdChange::Poi { v, add } => ct.update_poi(g, v, add).unwrap(),
    }
}

/// Generator of every vertex under the unconstrained safest path order,
/// by a label-setting search from all POIs at once. Ties between
/// generators go to the smaller id.
pub fn safest_generators(g: &RoadGraph) -> Vec<Option<VertexId>> {
    use ksnn::graph::edge_tie;
    use ksnn::PathCost;
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut best: Vec<Option<(PathCost, VertexId)>> = vec![None; g.vertex_count()];
    let mut done = vec![false; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    for &p in g.pois() {
        heap.push(Reverse((PathCost::zero(g.s_max()), p, p)));
    }
    while let Some(Reverse((cost, gen, v))) = heap.pop() {
        if done[v as usize] {
            continue;
        }
        done[v as usize] = true;
        best[v as usize] = Some((cost.clone(), gen));
        for inc in g.neighbors(v) {
            if !done[inc.to as usize] {
                let e = g.edge(v, inc.to).unwrap();
                heap.push(Reverse((cost.with_edge(e.ess, e.length as u64, edge_tie(e.key())), gen, inc.to)));
            }
        }
    }
    best.into_iter().map(|b| b.map(|x| x.1)).collect()
}
