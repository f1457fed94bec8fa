mod common;

use ksnn::ct::CtTree;
use ksnn::ine::ine_ksnn;
use ksnn::oracle::brute_ksnn;
use ksnn::snvd::Snvd;
use ksnn::QuerySpec;

#[test]
fn three_route_first_neighbor_from_every_engine() {
    let g = common::three_routes();
    let q = QuerySpec::new(common::S, 1, 10);
    let want = brute_ksnn(&g, &q).unwrap();
    assert_eq!(want.pois(), vec![common::P1]);
    assert_eq!(want.entries[0].path, vec![0, 1, 2, 3, 4]);
    assert_eq!(ine_ksnn(&g, &q).unwrap().answer, want);
    assert_eq!(CtTree::build(&g, None).unwrap().ksnn(&g, &q).unwrap().answer, want);
    assert_eq!(Snvd::build(&g).unwrap().ksnn(&g, &q).unwrap().answer, want);
}

#[test]
fn engines_match_the_oracle_on_small_graphs() {
    let mut rng = common::rng(7);
    for i in 0..300 {
        let g = common::small_graph(&mut rng);
        let ct = CtTree::build(&g, None).unwrap();
        let vd = Snvd::build(&g).unwrap();
        vd.check_border_balance(&g).unwrap();
        let (source, d_c) = common::small_query(&mut rng, &g);
        for k in [1, 3] {
            let q = QuerySpec::new(source, k, d_c);
            let want = brute_ksnn(&g, &q).unwrap();
            assert_eq!(ine_ksnn(&g, &q).unwrap().answer, want, "ine, instance {i}, k {k}");
            assert_eq!(ct.ksnn(&g, &q).unwrap().answer, want, "ct, instance {i}, k {k}");
            assert_eq!(vd.ksnn(&g, &q).unwrap().answer, want, "snvd, instance {i}, k {k}");
        }
    }
}
