use ksnn::engine::{EngineKind, Indexes};
use ksnn::harness::{
    bench_csv, compare_knn, knn_csv, mask_columns, run_bench, sample_queries, BenchConfig, TIME_COLUMNS,
};
use ksnn::ingest::{gen_synthetic, Shape, SyntheticSpec};
use ksnn::Error;

const CONFIG: &str = r#"
seed = 3
queries = 12
engines = ["ine", "ct", "snvd", "rtree"]
ablation = true

[shape]
kind = "grid"
rows = 14
cols = 14

[defaults]
k = 3
delta = 1.5
s_max = 5
rho = 0.05

[sweep]
k = [1, 5]
delta = [2.0]
rho = [0.1]
"#;

fn masked(cfg: &BenchConfig) -> String {
    mask_columns(&bench_csv(&run_bench(cfg, None).unwrap()).unwrap(), &TIME_COLUMNS).unwrap()
}

#[test]
fn bench_output_is_deterministic_apart_from_timings() {
    let cfg = BenchConfig::from_toml(CONFIG).unwrap();
    let first = masked(&cfg);
    assert_eq!(first, masked(&cfg));
    let parallel = BenchConfig { parallel: true, ..cfg.clone() };
    assert_eq!(first, masked(&parallel));

    let mut lines = first.lines();
    assert!(lines.next().unwrap().starts_with("schema,engine,rules,sweep,k,delta,s_max,rho,queries,index_build_ms"));
    let rows: Vec<&str> = lines.collect();
    // Default, two k values, one delta and one rho setting per engine, plus ablations.
    let sweeps = rows.iter().filter(|r| !r.contains(",ablation,")).count();
    assert_eq!(sweeps, 5 * 4);
    assert!(rows.iter().all(|r| r.starts_with("bench-v1,")));
    assert!(rows.iter().any(|r| r.contains(",ablation,")));
}

#[test]
fn counters_agree_with_rule_trends() {
    let cfg = BenchConfig::from_toml(CONFIG).unwrap();
    let rows = run_bench(&cfg, None).unwrap();
    for engine in [EngineKind::Ine, EngineKind::Ct, EngineKind::Snvd] {
        let abl: Vec<_> = rows.iter().filter(|r| r.engine == engine && r.sweep == "ablation").collect();
        let (basic, all) = (abl.first().unwrap(), abl.last().unwrap());
        assert!(all.mean_valid_paths_explored <= basic.mean_valid_paths_explored, "{}", engine.name());
    }
}

#[test]
fn config_rejects_unknown_keys_and_bad_values() {
    assert!(matches!(BenchConfig::from_toml("seeed = 1"), Err(Error::Config(_))));
    assert!(matches!(BenchConfig::from_toml("[defaults]\nk = 1\ndelta = 2.0\ns_max = 3\nrho = 0.1\nx = 1"), Err(Error::Config(_))));
    assert!(BenchConfig::from_toml("engines = [\"dijkstra\"]").is_err());
    assert!(matches!(BenchConfig::from_toml("queries = 0"), Err(Error::Config(_))));
    assert_eq!(BenchConfig::from_toml("").unwrap(), BenchConfig::default());

    let g = gen_synthetic(&SyntheticSpec { shape: Shape::Grid { rows: 5, cols: 5 }, rho: 0.2, s_max: 3, seed: 1 }).unwrap();
    let cfg = BenchConfig::from_toml("[sweep]\nrho = [0.1]").unwrap();
    assert!(matches!(run_bench(&cfg, Some(&g)), Err(Error::Config(_))));
}

#[test]
fn safest_neighbours_are_never_shorter_than_nearest_ones() {
    let g = gen_synthetic(&SyntheticSpec { shape: Shape::Grid { rows: 20, cols: 20 }, rho: 0.04, s_max: 8, seed: 11 }).unwrap();
    let idx = Indexes::build(&g, &[EngineKind::Ct], None).unwrap();
    let sources = sample_queries(&g, 25, 4);
    assert!(sources.iter().all(|&s| !g.is_poi(s)));
    let k = 4;
    let rows = compare_knn(&g, &idx, EngineKind::Ct, &sources, k, &[1.25, 2.0]).unwrap();
    assert_eq!(rows.len(), 2 * (sources.len() + 1));
    for r in rows.iter().filter(|r| r.query.is_some()) {
        assert!(r.ksnn_mean_length >= r.knn_mean_length, "{r:?}");
        assert!(r.common_pois <= k as f64);
        assert!(r.ksnn_mean_pss >= r.knn_mean_pss * (1.0 - 1e-9), "{r:?}");
    }
    let text = knn_csv(&rows).unwrap();
    assert!(text.lines().next().unwrap().starts_with("schema,delta,query,source,d_c,common_pois"));
    assert_eq!(text.lines().filter(|l| l.contains(",all,all,")).count(), 2);
}
