mod common;

use ksnn::ct::CtTree;
use ksnn::oracle::brute_ksnn;
use ksnn::snvd::Snvd;
use ksnn::QuerySpec;
use rand::Rng;

#[test]
fn incremental_indexes_equal_fresh_builds() {
    let mut rng = common::rng(5);
    for i in 0..800 {
        let mut g = common::small_graph(&mut rng);
        let hc = if rng.gen_bool(0.5) { None } else { Some(rng.gen_range(1..=3)) };
        let mut ct = CtTree::build(&g, hc).unwrap();
        let mut vd = Snvd::build(&g).unwrap();
        let mut g2 = g.clone();
        for step in 0..10 {
            let m = common::mutation(&mut rng, &g);
            common::apply_ct(&mut ct, &mut g, m);
            vd.update(&mut g2, m).unwrap();
            assert_eq!(g, g2);
            assert_eq!(ct.canonical(), CtTree::build(&g, hc).unwrap().canonical(), "ct {i} step {step} {m:?}");
            assert_eq!(vd, Snvd::build(&g2).unwrap(), "snvd {i} step {step} {m:?}");
        }
    }
}

#[test]
fn queries_after_updates_match_the_oracle() {
    let mut rng = common::rng(6);
    for i in 0..200 {
        let mut g = common::small_graph(&mut rng);
        let mut ct = CtTree::build(&g, None).unwrap();
        let mut vd = Snvd::build(&g).unwrap();
        let mut g2 = g.clone();
        for _ in 0..5 {
            let m = common::mutation(&mut rng, &g);
            common::apply_ct(&mut ct, &mut g, m);
            vd.update(&mut g2, m).unwrap();
        }
        let source = rng.gen_range(0..g.vertex_count() as u32);
        let q = QuerySpec::new(source, 3, rng.gen_range(2..25));
        let want = brute_ksnn(&g, &q).unwrap();
        assert_eq!(ct.ksnn(&g, &q).unwrap().answer, want, "ct {i}");
        assert_eq!(vd.ksnn(&g, &q).unwrap().answer, want, "snvd {i}");
    }
}
