mod common;

use ksnn::oracle::brute_ksnn;
use ksnn::rtree::{rtree_ksnn, PoiSpatialIndex};
use ksnn::{QuerySpec, VertexId};
use rand::Rng;

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

#[test]
fn only_pois_within_straight_line_reach_are_searched() {
    let mut rng = common::rng(31);
    for _ in 0..300 {
        let g = common::small_graph(&mut rng);
        let idx = PoiSpatialIndex::build(&g).unwrap();
        let source = rng.gen_range(0..g.vertex_count()) as VertexId;
        let d_c = rng.gen_range(2..=g.total_length() + 1);
        let q = QuerySpec::new(source, rng.gen_range(1..=4), d_c);
        let out = rtree_ksnn(&g, &idx, &q).unwrap();
        assert_eq!(out.answer, brute_ksnn(&g, &q).unwrap());
        let xy = g.coords().unwrap();
        let near = g.pois().iter().filter(|&&p| euclid(xy[source as usize], xy[p as usize]) < d_c as f64).count();
        assert!(out.counters.candidate_searches as usize <= near);
        for e in &out.answer.entries {
            assert!(euclid(xy[source as usize], xy[e.poi as usize]) < d_c as f64);
        }
    }
}

#[test]
fn index_needs_coordinates_and_round_trips() {
    let mut g = common::three_routes();
    let idx = PoiSpatialIndex::build(&g).unwrap();
    assert_eq!(idx.len(), 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.rtree");
    idx.save(&path, &g).unwrap();
    assert!(PoiSpatialIndex::is_index_file(&path).unwrap());
    assert_eq!(PoiSpatialIndex::load(&path, &g).unwrap(), idx);

    g.clear_coords();
    assert!(PoiSpatialIndex::build(&g).is_err());
    assert!(rtree_ksnn(&g, &idx, &QuerySpec::new(0, 1, 10)).is_err());
}
