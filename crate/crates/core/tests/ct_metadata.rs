mod common;

use ksnn::ct::CtTree;
use ksnn::ingest::{gen_synthetic, Shape, SyntheticSpec};
use ksnn::{RoadGraph, VertexId};
use rand::Rng;

const INF: u64 = u64::MAX / 4;

/// All-pairs distances over `vertices` using edges with ESS above `floor`.
fn floyd(g: &RoadGraph, vertices: &[VertexId], floor: u32) -> Vec<Vec<u64>> {
    let n = vertices.len();
    let at = |v: VertexId| vertices.binary_search(&v).ok();
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in g.edges() {
        if let (Some(a), Some(b), true) = (at(e.u), at(e.v), e.ess > floor) {
            let l = e.length as u64;
            d[a][b] = d[a][b].min(l);
            d[b][a] = d[b][a].min(l);
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][m] + d[m][j] < d[i][j] {
                    d[i][j] = d[i][m] + d[m][j];
                }
            }
        }
    }
    d
}

fn check(g: &RoadGraph, ct: &CtTree) {
    let root = ct.node(ct.root());
    assert_eq!(root.vertices, (0..g.vertex_count() as VertexId).collect::<Vec<_>>());
    for n in ct.nodes() {
        let d = floyd(g, &n.vertices, n.floor);
        let pois: Vec<VertexId> = n.vertices.iter().copied().filter(|&v| g.is_poi(v)).collect();
        assert_eq!(n.pois, pois, "node {}", n.id);
        if let Some(p) = n.parent {
            let parent = ct.node(p);
            assert!(n.floor > parent.floor);
            assert!(n.vertices.iter().all(|&v| parent.contains(v)));
            // Connected under the node's floor.
            assert!(d[0].iter().all(|&x| x < INF), "node {} is not connected", n.id);
        }
        // Children partition the node's vertices among their components.
        let mut covered: Vec<VertexId> = n.children.iter().flat_map(|&c| ct.node(c).vertices.clone()).collect();
        covered.sort_unstable();
        let before = covered.len();
        covered.dedup();
        assert_eq!(before, covered.len(), "children of {} overlap", n.id);

        let border_set: Vec<VertexId> = if n.parent.is_none() {
            Vec::new()
        } else {
            n.vertices.iter().copied().filter(|&v| g.min_incident_ess(v).is_some_and(|m| m <= n.floor)).collect()
        };
        assert_eq!(n.borders.iter().map(|b| b.vertex).collect::<Vec<_>>(), border_set, "node {}", n.id);
        let idx = |v: VertexId| n.vertices.binary_search(&v).unwrap();
        for b in &n.borders {
            let i = idx(b.vertex);
            let to_border = border_set.iter().filter(|&&o| o != b.vertex).map(|&o| d[i][idx(o)]).filter(|&x| x < INF).min();
            let to_poi = pois.iter().map(|&p| d[i][idx(p)]).filter(|&x| x < INF).min();
            assert_eq!(b.min_border_dist, to_border, "node {} border {}", n.id, b.vertex);
            assert_eq!(b.min_poi_dist, to_poi, "node {} border {}", n.id, b.vertex);
        }
    }
    for v in 0..g.vertex_count() as VertexId {
        let chain = ct.locator(v);
        assert_eq!(chain[0], ct.root());
        for w in chain.windows(2) {
            assert!(ct.node(w[0]).children.contains(&w[1]));
        }
        assert!(chain.iter().all(|&id| ct.node(id).contains(v)));
    }
}

#[test]
fn metadata_matches_all_pairs_distances_on_small_graphs() {
    let mut rng = common::rng(3);
    for _ in 0..300 {
        let g = common::small_graph(&mut rng);
        let hc = if rng.gen_bool(0.5) { None } else { Some(rng.gen_range(1..=3)) };
        check(&g, &CtTree::build(&g, hc).unwrap());
    }
}

#[test]
fn metadata_matches_all_pairs_distances_on_grids() {
    for seed in 0..10 {
        let spec = SyntheticSpec { shape: Shape::Grid { rows: 7, cols: 8 }, rho: 0.1, s_max: 5, seed };
        let g = gen_synthetic(&spec).unwrap();
        check(&g, &CtTree::build(&g, None).unwrap());
        check(&g, &CtTree::build(&g, Some(2)).unwrap());
    }
}

#[test]
fn uniform_scores_give_a_single_node() {
    let spec = SyntheticSpec { shape: Shape::Grid { rows: 5, cols: 5 }, rho: 0.2, s_max: 1, seed: 4 };
    let g = gen_synthetic(&spec).unwrap();
    let ct = CtTree::build(&g, None).unwrap();
    assert_eq!(ct.node_count(), 1);
}

#[test]
fn height_cap_limits_depth() {
    let spec = SyntheticSpec { shape: Shape::Grid { rows: 12, cols: 12 }, rho: 0.05, s_max: 10, seed: 2 };
    let g = gen_synthetic(&spec).unwrap();
    for cap in 1..=4 {
        assert!(CtTree::build(&g, Some(cap)).unwrap().height() <= cap);
    }
}
