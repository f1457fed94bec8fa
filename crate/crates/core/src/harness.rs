//! Parameter sweeps, pruning ablations and the kNN versus kSNN comparison.
//!
//! Bench CSV columns (schema `bench-v1`):
//! `schema,engine,rules,sweep,k,delta,s_max,rho,queries,index_build_ms,
//! mean_time_ms,median_time_ms,mean_vertices_accessed,
//! mean_valid_paths_explored,mean_candidate_searches`.
//!
//! Comparison CSV columns (schema `knn-v1`), numbers to 3 significant digits:
//! `schema,delta,query,source,d_c,common_pois,snn1_in_knn,knn_mean_length,
//! ksnn_mean_length,length_ratio,knn_mean_pss,ksnn_mean_pss,pss_ratio`.
//! Aggregate rows use `all` in the `query` and `source` columns and report
//! the fraction of queries whose first safest neighbour is among the kNNs.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::dijkstra::{d_c_from_delta, k_nearest_pois};
use crate::engine::{EngineKind, Indexes};
use crate::error::{Error, Result};
use crate::graph::{RoadGraph, VertexId};
use crate::ine::safest_valid_path;
use crate::ingest::{gen_synthetic, Shape, SyntheticSpec};
use crate::par::Parallelism;
use crate::query::{QuerySpec, Rules, SearchOptions, Tally};
use crate::safety::{pss, PathCost};

pub const BENCH_SCHEMA: &str = "bench-v1";
pub const KNN_SCHEMA: &str = "knn-v1";

/// Columns holding wall-clock measurements; they differ between runs.
pub const TIME_COLUMNS: [&str; 3] = ["index_build_ms", "mean_time_ms", "median_time_ms"];

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub k: usize,
    pub delta: f64,
    pub s_max: u32,
    pub rho: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { k: 10, delta: 2.0, s_max: 10, rho: 0.01 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub k: Vec<usize>,
    pub delta: Vec<f64>,
    pub s_max: Vec<u32>,
    pub rho: Vec<f64>,
}

impl Sweep {
    /// The full parameter ranges of the standard experiments.
    pub fn standard() -> Sweep {
        Sweep {
            k: vec![1, 5, 10, 25, 50],
            delta: vec![1.25, 1.5, 1.75, 2.0],
            s_max: vec![5, 10, 15],
            rho: vec![0.00001, 0.0001, 0.001, 0.01, 0.1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub seed: u64,
    pub queries: usize,
    pub engines: Vec<String>,
    /// Synthetic graph shape; ignored when a graph is passed in.
    pub shape: Shape,
    pub defaults: Params,
    pub sweep: Sweep,
    /// Adds rows for the basic algorithm, each single extra rule, and all rules.
    pub ablation: bool,
    /// Spreads queries over threads; timings then include contention.
    pub parallel: bool,
    pub ct_height_cap: Option<u32>,
    pub max_paths: Option<u64>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: 1,
            queries: 100,
            engines: EngineKind::ALL.iter().map(|e| e.name().to_string()).collect(),
            shape: Shape::Grid { rows: 100, cols: 100 },
            defaults: Params::default(),
            sweep: Sweep::default(),
            ablation: false,
            parallel: false,
            ct_height_cap: None,
            max_paths: None,
        }
    }
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<BenchConfig> {
        let cfg: BenchConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.engine_kinds()?;
        if cfg.queries == 0 {
            return Err(Error::Config("queries must be positive".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<BenchConfig> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn engine_kinds(&self) -> Result<Vec<EngineKind>> {
        self.engines.iter().map(|e| e.parse()).collect()
    }
}

/// `count` distinct query vertices drawn uniformly from the non-POI
/// vertices, or from all vertices when every vertex is a POI.
pub fn sample_queries(graph: &RoadGraph, count: usize, seed: u64) -> Vec<VertexId> {
    let mut pool: Vec<VertexId> = (0..graph.vertex_count() as VertexId).filter(|&v| !graph.is_poi(v)).collect();
    if pool.is_empty() {
        pool = (0..graph.vertex_count() as VertexId).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let take = count.min(pool.len());
    sample(&mut rng, pool.len(), take).into_iter().map(|i| pool[i]).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub engine: EngineKind,
    pub rules: Rules,
    pub sweep: String,
    pub params: Params,
    pub queries: usize,
    pub index_build_ms: f64,
    pub mean_time_ms: f64,
    pub median_time_ms: f64,
    pub mean_vertices_accessed: f64,
    pub mean_valid_paths_explored: f64,
    pub mean_candidate_searches: f64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Runs one engine on the sampled queries of one graph.
#[allow(clippy::too_many_arguments)]
fn measure(
    graph: &RoadGraph,
    idx: &Indexes,
    engine: EngineKind,
    rules: Rules,
    sweep: &str,
    params: Params,
    sources: &[VertexId],
    build_ms: f64,
    cfg: &BenchConfig,
) -> Result<BenchRow> {
    let queries: Vec<QuerySpec> = sources
        .iter()
        .map(|&s| QuerySpec::new(s, params.k, d_c_from_delta(graph, s, params.k, params.delta)))
        .collect();
    let opts = SearchOptions { rules, max_paths: cfg.max_paths };
    let mode = if cfg.parallel { Parallelism::Parallel } else { Parallelism::Sequential };
    let timed: Vec<Result<(f64, crate::query::Counters)>> = crate::par::map(mode, &queries, |q| {
        let t = Instant::now();
        let out = idx.run(engine, graph, q, &opts)?;
        Ok((t.elapsed().as_secs_f64() * 1e3, out.counters))
    });
    let timed = timed.into_iter().collect::<Result<Vec<_>>>()?;
    let n = timed.len().max(1) as f64;
    let mean = |f: &dyn Fn(&(f64, crate::query::Counters)) -> f64| timed.iter().map(f).sum::<f64>() / n;
    Ok(BenchRow {
        engine,
        rules,
        sweep: sweep.to_string(),
        params,
        queries: timed.len(),
        index_build_ms: build_ms,
        mean_time_ms: mean(&|t| t.0),
        median_time_ms: median(timed.iter().map(|t| t.0).collect()),
        mean_vertices_accessed: mean(&|t| t.1.vertices_accessed as f64),
        mean_valid_paths_explored: mean(&|t| t.1.valid_paths_explored as f64),
        mean_candidate_searches: mean(&|t| t.1.candidate_searches as f64),
    })
}

/// Rule sets of an ablation: the basic algorithm (Rule 1 only), Rule 1 plus
/// each other rule on its own, and all rules.
pub fn ablation_rules(engine: EngineKind) -> Vec<Rules> {
    let applicable = engine.rules();
    if applicable.is_empty() {
        return vec![Rules::all().restrict(applicable)];
    }
    let mut out = vec![Rules::only(&[1])];
    out.extend(applicable.iter().filter(|&&r| r != 1).map(|&r| Rules::only(&[1, r])));
    out.push(Rules::all().restrict(applicable));
    out
}

/// Runs the configured sweep. With `base` the graph is fixed and only `k`
/// and `delta` may vary; otherwise a synthetic graph is generated per
/// `(s_max, rho)` setting.
pub fn run_bench(cfg: &BenchConfig, base: Option<&RoadGraph>) -> Result<Vec<BenchRow>> {
    let engines = cfg.engine_kinds()?;
    if base.is_some() && (!cfg.sweep.s_max.is_empty() || !cfg.sweep.rho.is_empty()) {
        return Err(Error::Config("s_max and rho sweeps need a synthetic graph".into()));
    }
    let d = cfg.defaults;
    let mut settings: Vec<(String, Params)> = vec![("default".into(), d)];
    settings.extend(cfg.sweep.k.iter().map(|&k| ("k".into(), Params { k, ..d })));
    settings.extend(cfg.sweep.delta.iter().map(|&delta| ("delta".into(), Params { delta, ..d })));
    settings.extend(cfg.sweep.s_max.iter().map(|&s_max| ("s_max".into(), Params { s_max, ..d })));
    settings.extend(cfg.sweep.rho.iter().map(|&rho| ("rho".into(), Params { rho, ..d })));

    // Settings grouped by graph so each graph and its indexes are built once.
    let mut by_graph: BTreeMap<(u32, u64), Vec<(String, Params)>> = BTreeMap::new();
    for (name, p) in settings {
        by_graph.entry((p.s_max, p.rho.to_bits())).or_default().push((name, p));
    }
    let mut rows = Vec::new();
    for ((s_max, rho_bits), group) in by_graph {
        let owned;
        let graph = match base {
            Some(g) => g,
            None => {
                let spec = SyntheticSpec { shape: cfg.shape, rho: f64::from_bits(rho_bits), s_max, seed: cfg.seed };
                owned = gen_synthetic(&spec)?;
                &owned
            }
        };
        let sources = sample_queries(graph, cfg.queries, cfg.seed);
        let mut idx = Indexes::default();
        let mut build_ms = BTreeMap::new();
        for &e in &engines {
            let t = Instant::now();
            idx.ensure(graph, e, cfg.ct_height_cap)?;
            build_ms.insert(e, t.elapsed().as_secs_f64() * 1e3);
        }
        for (name, p) in &group {
            let p = Params { s_max: graph.s_max(), ..*p };
            for &e in &engines {
                let all = Rules::all().restrict(e.rules());
                rows.push(measure(graph, &idx, e, all, name, p, &sources, build_ms[&e], cfg)?);
            }
        }
        if cfg.ablation && group.iter().any(|(n, _)| n == "default") {
            let p = Params { s_max: graph.s_max(), ..d };
            for &e in &engines {
                for rules in ablation_rules(e) {
                    rows.push(measure(graph, &idx, e, rules, "ablation", p, &sources, build_ms[&e], cfg)?);
                }
            }
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "schema",
        "engine",
        "rules",
        "sweep",
        "k",
        "delta",
        "s_max",
        "rho",
        "queries",
        "index_build_ms",
        "mean_time_ms",
        "median_time_ms",
        "mean_vertices_accessed",
        "mean_valid_paths_explored",
        "mean_candidate_searches",
    ])?;
    for r in rows {
        w.write_record([
            BENCH_SCHEMA.to_string(),
            r.engine.to_string(),
            r.rules.to_string(),
            r.sweep.clone(),
            r.params.k.to_string(),
            r.params.delta.to_string(),
            r.params.s_max.to_string(),
            r.params.rho.to_string(),
            r.queries.to_string(),
            format!("{:.3}", r.index_build_ms),
            format!("{:.3}", r.mean_time_ms),
            format!("{:.3}", r.median_time_ms),
            format!("{:.2}", r.mean_vertices_accessed),
            format!("{:.2}", r.mean_valid_paths_explored),
            format!("{:.2}", r.mean_candidate_searches),
        ])?;
    }
    csv_string(w)
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Copy of a CSV document with the named columns blanked.
pub fn mask_columns(csv_text: &str, columns: &[&str]) -> Result<String> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = r.headers()?.clone();
    let masked: HashSet<usize> = headers.iter().enumerate().filter(|(_, h)| columns.contains(h)).map(|(i, _)| i).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&headers)?;
    for rec in r.records() {
        let rec = rec?;
        w.write_record(rec.iter().enumerate().map(|(i, f)| if masked.contains(&i) { "" } else { f }))?;
    }
    csv_string(w)
}

/// Formats `x` with three significant digits.
pub fn sig3(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.2e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnnRow {
    pub delta: f64,
    /// `None` on aggregate rows.
    pub query: Option<usize>,
    pub source: Option<VertexId>,
    pub d_c: Option<u64>,
    pub common_pois: f64,
    /// 0 or 1 per query; a fraction on aggregate rows.
    pub snn1_in_knn: f64,
    pub knn_mean_length: f64,
    pub ksnn_mean_length: f64,
    pub knn_mean_pss: f64,
    pub ksnn_mean_pss: f64,
    /// PSS of the first safest neighbour's path and of the safest valid path
    /// to the nearest POI.
    pub snn1_pss: f64,
    pub nn1_safest_pss: f64,
}

impl KnnRow {
    pub fn length_ratio(&self) -> f64 {
        self.ksnn_mean_length / self.knn_mean_length
    }

    pub fn pss_ratio(&self) -> f64 {
        self.ksnn_mean_pss / self.knn_mean_pss
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Per-query and aggregate comparison of the `k` nearest POIs by network
/// distance with the `k` safest nearby POIs, for each `delta`.
pub fn compare_knn(
    graph: &RoadGraph,
    idx: &Indexes,
    engine: EngineKind,
    sources: &[VertexId],
    k: usize,
    deltas: &[f64],
) -> Result<Vec<KnnRow>> {
    let mut rows = Vec::new();
    for &delta in deltas {
        let mut per_query = Vec::new();
        for (i, &s) in sources.iter().enumerate() {
            let d_c = d_c_from_delta(graph, s, k, delta);
            let knn = k_nearest_pois(graph, s, k);
            if knn.is_empty() {
                continue;
            }
            let ksnn = idx.run(engine, graph, &QuerySpec::new(s, k, d_c), &SearchOptions::default())?.answer;
            let knn_set: HashSet<VertexId> = knn.iter().map(|x| x.0).collect();
            let mut tally = Tally::new(graph.vertex_count(), None);
            let knn_pss: Vec<f64> = knn
                .iter()
                .map(|(_, _, path)| Ok(pss(&path_cost(graph, path).sig, d_c)?.to_f64()))
                .collect::<Result<_>>()?;
            let nn1 = safest_valid_path(graph, s, knn[0].0, d_c, &mut tally)?
                .map(|(c, _)| pss(&c.sig, d_c))
                .transpose()?
                .map_or(0.0, |p| p.to_f64());
            per_query.push(KnnRow {
                delta,
                query: Some(i),
                source: Some(s),
                d_c: Some(d_c),
                common_pois: ksnn.entries.iter().filter(|e| knn_set.contains(&e.poi)).count() as f64,
                snn1_in_knn: ksnn.entries.first().map_or(0.0, |e| f64::from(u8::from(knn_set.contains(&e.poi)))),
                knn_mean_length: mean(knn.iter().map(|x| x.1 as f64)),
                ksnn_mean_length: mean(ksnn.entries.iter().map(|e| e.length as f64)),
                knn_mean_pss: mean(knn_pss.into_iter()),
                ksnn_mean_pss: mean(ksnn.entries.iter().map(|e| e.pss.to_f64())),
                snn1_pss: ksnn.entries.first().map_or(0.0, |e| e.pss.to_f64()),
                nn1_safest_pss: nn1,
            });
        }
        let agg = |f: fn(&KnnRow) -> f64| mean(per_query.iter().map(f));
        let aggregate = KnnRow {
            delta,
            query: None,
            source: None,
            d_c: None,
            common_pois: agg(|r| r.common_pois),
            snn1_in_knn: agg(|r| r.snn1_in_knn),
            knn_mean_length: agg(|r| r.knn_mean_length),
            ksnn_mean_length: agg(|r| r.ksnn_mean_length),
            knn_mean_pss: agg(|r| r.knn_mean_pss),
            ksnn_mean_pss: agg(|r| r.ksnn_mean_pss),
            snn1_pss: agg(|r| r.snn1_pss),
            nn1_safest_pss: agg(|r| r.nn1_safest_pss),
        };
        rows.extend(per_query);
        rows.push(aggregate);
    }
    Ok(rows)
}

fn path_cost(graph: &RoadGraph, path: &[VertexId]) -> PathCost {
    let mut c = PathCost::zero(graph.s_max());
    for w in path.windows(2) {
        let e = graph.edge(w[0], w[1]).expect("path follows graph edges");
        c = c.with_edge(e.ess, e.length as u64, crate::graph::edge_tie(e.key()));
    }
    c
}

pub fn knn_csv(rows: &[KnnRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "schema",
        "delta",
        "query",
        "source",
        "d_c",
        "common_pois",
        "snn1_in_knn",
        "knn_mean_length",
        "ksnn_mean_length",
        "length_ratio",
        "knn_mean_pss",
        "ksnn_mean_pss",
        "pss_ratio",
    ])?;
    let opt = |x: Option<String>| x.unwrap_or_else(|| "all".into());
    for r in rows {
        w.write_record([
            KNN_SCHEMA.to_string(),
            r.delta.to_string(),
            opt(r.query.map(|q| q.to_string())),
            opt(r.source.map(|s| s.to_string())),
            r.d_c.map(|d| d.to_string()).unwrap_or_default(),
            sig3(r.common_pois),
            sig3(r.snn1_in_knn),
            sig3(r.knn_mean_length),
            sig3(r.ksnn_mean_length),
            sig3(r.length_ratio()),
            sig3(r.knn_mean_pss),
            sig3(r.ksnn_mean_pss),
            sig3(r.pss_ratio()),
        ])?;
    }
    csv_string(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_significant_digits() {
        assert_eq!(sig3(0.0123456), "0.0123");
        assert_eq!(sig3(12345.0), "12300");
        assert_eq!(sig3(1.0), "1");
        assert_eq!(sig3(0.0), "0");
        assert_eq!(sig3(2.0 / 3.0), "0.667");
    }

    #[test]
    fn config_defaults_and_errors() {
        let cfg = BenchConfig::from_toml("queries = 5\n[defaults]\nk = 3\ndelta = 1.5\ns_max = 4\nrho = 0.1\n").unwrap();
        assert_eq!(cfg.queries, 5);
        assert_eq!(cfg.defaults.k, 3);
        assert_eq!(cfg.engines.len(), 4);
        assert!(BenchConfig::from_toml("engines = [\"bfs\"]").is_err());
        assert!(BenchConfig::from_toml("quries = 5").is_err());
        let shaped = BenchConfig::from_toml("shape = { kind = \"random\", n = 50, degree = 3 }").unwrap();
        assert_eq!(shaped.shape, Shape::Random { n: 50, degree: 3 });
    }

    #[test]
    fn ablation_rows_start_basic_and_end_all() {
        let rows = ablation_rules(EngineKind::Snvd);
        assert_eq!(rows.first(), Some(&Rules::only(&[1])));
        assert_eq!(rows.last(), Some(&Rules::only(&[1, 2, 5, 6, 7])));
        assert_eq!(rows.len(), 6);
    }

    #[test]
    fn queries_avoid_pois() {
        let spec = SyntheticSpec { shape: Shape::Grid { rows: 5, cols: 5 }, rho: 0.4, s_max: 3, seed: 2 };
        let g = gen_synthetic(&spec).unwrap();
        let q = sample_queries(&g, 10, 4);
        assert_eq!(q.len(), 10);
        assert!(q.iter().all(|&v| !g.is_poi(v)));
        assert_eq!(q, sample_queries(&g, 10, 4));
    }

    #[test]
    fn masking_blanks_time_columns() {
        let text = "a,mean_time_ms,b\n1,2.5,3\n";
        assert_eq!(mask_columns(text, &TIME_COLUMNS).unwrap(), "a,mean_time_ms,b\n1,,3\n");
    }
}
