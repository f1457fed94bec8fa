mod common;

use ksnn::engine::{EngineKind, Indexes};
use ksnn::oracle::brute_ksnn;
use ksnn::{QuerySpec, Rules, SearchOptions};
use rand::Rng;

#[test]
fn every_rule_subset_gives_the_oracle_answer() {
    let mut rng = common::rng(99);
    for i in 0..400 {
        let g = common::small_graph(&mut rng);
        let hc = if rng.gen_bool(0.5) { None } else { Some(rng.gen_range(1..=3)) };
        let idx = Indexes::build(&g, &EngineKind::ALL, hc).unwrap();
        let (source, mut d_c) = common::small_query(&mut rng, &g);
        if rng.gen_bool(0.3) {
            d_c += rng.gen_range(0..15);
        }
        for k in [1, 2, 3, 5] {
            let q = QuerySpec::new(source, k, d_c);
            let want = brute_ksnn(&g, &q).unwrap();
            for e in EngineKind::ALL {
                for r in Rules::subsets(e.rules()) {
                    let got = idx.run(e, &g, &q, &SearchOptions::with_rules(r)).unwrap().answer;
                    assert_eq!(got, want, "{e} instance {i} k {k} rules {r}");
                }
            }
        }
    }
}

#[test]
fn more_rules_never_explore_more_paths() {
    let mut rng = common::rng(98);
    for i in 0..300 {
        let g = common::small_graph(&mut rng);
        let idx = Indexes::build(&g, &EngineKind::ALL, None).unwrap();
        let (source, d_c) = common::small_query(&mut rng, &g);
        let q = QuerySpec::new(source, 3, d_c);
        for e in [EngineKind::Ine, EngineKind::Ct, EngineKind::Snvd] {
            let all = idx.run(e, &g, &q, &SearchOptions::default()).unwrap().counters;
            let basic = idx.run(e, &g, &q, &SearchOptions::with_rules(Rules::only(&[1]))).unwrap().counters;
            assert!(all.valid_paths_explored <= basic.valid_paths_explored, "{e} instance {i}");
        }
    }
}

#[test]
fn path_budget_is_enforced() {
    let mut rng = common::rng(97);
    let g = common::small_graph(&mut rng);
    let (source, d_c) = common::small_query(&mut rng, &g);
    let q = QuerySpec::new(source, 3, d_c + 30);
    let opts = SearchOptions { rules: Rules::none(), max_paths: Some(1) };
    let err = Indexes::default().run(EngineKind::Ine, &g, &q, &opts);
    assert!(matches!(err, Err(ksnn::Error::Budget(1))));
}
