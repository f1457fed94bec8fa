use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ksnn::dijkstra::d_c_from_delta;
use ksnn::engine::{EngineKind, Indexes};
use ksnn::harness::{self, BenchConfig};
use ksnn::ingest::{self, CrimeProjection, LoadOptions, Shape, SyntheticSpec};
use ksnn::{QuerySpec, RoadGraph, Rules, SearchOptions, VertexId};

#[derive(Parser)]
#[command(name = "ksnn", version, about = "Safest nearby neighbor queries on road networks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Edge file (`u v length ess` per line).
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// POI file (one vertex id per line).
    #[arg(long, global = true)]
    pois: Option<PathBuf>,
    /// Coordinate file (`v x y` per line).
    #[arg(long, global = true)]
    coords: Option<PathBuf>,
    /// Index file to read (query) or write (build-index).
    #[arg(long, global = true)]
    index: Option<PathBuf>,
    /// Random seed; defaults to 1, or to the config's seed for `bench`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file, or output directory for commands that write a graph.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Multiplier applied to raw edge lengths before rounding.
    #[arg(long, global = true, default_value_t = 1.0)]
    length_scale: f64,
    /// Largest ESS, when the edge file does not declare it.
    #[arg(long, global = true)]
    s_max: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Grid,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexKind {
    Ct,
    Snvd,
    Rtree,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic graph into the `--out` directory.
    Gen {
        #[arg(long, value_enum, default_value = "grid")]
        shape: ShapeArg,
        #[arg(long, default_value_t = 100)]
        rows: usize,
        #[arg(long, default_value_t = 100)]
        cols: usize,
        /// Vertex count of a random graph.
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Nearest neighbours joined per vertex in a random graph.
        #[arg(long, default_value_t = 3)]
        degree: usize,
        /// POIs per vertex.
        #[arg(long, default_value_t = 0.01)]
        rho: f64,
        /// ESS values are drawn from 1 to this value.
        #[arg(long = "ess-max", default_value_t = 10)]
        ess_max: u32,
    },
    /// Replace edge safety scores with ones derived from crime records and
    /// write the graph into the `--out` directory.
    AssignEss {
        /// CSV with columns `x,y` or `lat,lon`.
        #[arg(long)]
        crimes: PathBuf,
        /// Search radius around each edge in coordinate units.
        #[arg(long, default_value_t = 1000.0)]
        radius: f64,
        #[arg(long = "ess-max", default_value_t = 10)]
        ess_max: u32,
        /// Reference latitude for projecting `lat,lon` records.
        #[arg(long)]
        ref_lat: Option<f64>,
    },
    /// Build an index and write it to `--out` (or `--index`).
    BuildIndex {
        #[arg(value_enum)]
        kind: IndexKind,
        /// Maximum Ct-tree height.
        #[arg(long)]
        height_cap: Option<u32>,
    },
    /// Answer one kSNN query.
    Query {
        /// One of `ine`, `ct`, `snvd`, `rtree`.
        #[arg(long, default_value = "snvd")]
        engine: String,
        /// Query vertex.
        #[arg(long)]
        source: VertexId,
        /// Number of POIs to return.
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Distance constraint; derived from `--delta` when absent.
        #[arg(long)]
        d_c: Option<u64>,
        /// d_c is `ceil(delta * d_k) + 1`, with `d_k` the distance to the k-th nearest POI.
        #[arg(long, default_value_t = 2.0)]
        delta: f64,
        /// Pruning rules, e.g. `all`, `none` or `1,2,5`.
        #[arg(long, default_value = "all")]
        rules: String,
        /// Also run this engine and fail unless both answers match.
        #[arg(long)]
        verify: Option<String>,
        /// Abort after enqueuing this many paths.
        #[arg(long)]
        max_paths: Option<u64>,
        /// Ct-tree height cap when the tree is built in memory.
        #[arg(long)]
        height_cap: Option<u32>,
    },
    /// Run a benchmark sweep and write CSV.
    Bench {
        /// TOML configuration; built-in defaults when absent.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compare kNN and kSNN answers and write CSV.
    CompareKnn {
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Comma-separated delta values, one d_c per query and delta.
        #[arg(long, value_delimiter = ',', default_value = "1.25,1.5,1.75,2")]
        deltas: Vec<f64>,
        /// Number of non-POI query vertices sampled with `--seed`.
        #[arg(long, default_value_t = 100)]
        queries: usize,
        /// Engine answering the kSNN side.
        #[arg(long, default_value = "snvd")]
        engine: String,
    },
}

fn load_graph(g: &Global) -> Result<RoadGraph> {
    let Some(edges) = &g.graph else { bail!("--graph is required") };
    let opts = LoadOptions { length_scale: g.length_scale, s_max: g.s_max };
    let loaded = ingest::load_graph(edges, g.pois.as_deref(), g.coords.as_deref(), &opts)
        .with_context(|| format!("loading {}", edges.display()))?;
    if loaded.collapsed > 0 {
        eprintln!("note: {} parallel edges collapsed", loaded.collapsed);
    }
    Ok(loaded.graph)
}

fn save_dir(graph: &RoadGraph, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let coords = dir.join("coords.tsv");
    ingest::save_graph(graph, &dir.join("graph.tsv"), Some(&dir.join("pois.txt")), Some(&coords))?;
    println!("wrote {} vertices, {} edges, {} POIs to {}", graph.vertex_count(), graph.edge_count(), graph.pois().len(), dir.display());
    Ok(())
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match cli.cmd {
        Cmd::Gen { shape, rows, cols, n, degree, rho, ess_max } => {
            let Some(out) = &g.out else { bail!("--out directory is required") };
            let shape = match shape {
                ShapeArg::Grid => Shape::Grid { rows, cols },
                ShapeArg::Random => Shape::Random { n, degree },
            };
            let graph = ingest::gen_synthetic(&SyntheticSpec { shape, rho, s_max: ess_max, seed: g.seed.unwrap_or(1) })?;
            save_dir(&graph, out)
        }
        Cmd::AssignEss { crimes, radius, ess_max, ref_lat } => {
            let Some(out) = &g.out else { bail!("--out directory is required") };
            let graph = load_graph(g)?;
            let projection = match ref_lat {
                Some(ref_lat) => CrimeProjection::Equirectangular { ref_lat },
                None => CrimeProjection::Planar,
            };
            let points = ingest::load_crimes(&crimes, projection)?;
            let scored = ingest::assign_ess(&graph, &points, radius, ess_max)?;
            println!("{} crime records", points.len());
            save_dir(&scored, out)
        }
        Cmd::BuildIndex { kind, height_cap } => {
            let graph = load_graph(g)?;
            let Some(out) = g.out.as_ref().or(g.index.as_ref()) else { bail!("--out or --index is required") };
            let t = Instant::now();
            match kind {
                IndexKind::Ct => {
                    let ct = ksnn::ct::CtTree::build(&graph, height_cap)?;
                    ct.save(out, &graph)?;
                    println!("ct-tree: {} nodes, height {}", ct.node_count(), ct.height());
                }
                IndexKind::Snvd => {
                    let vd = ksnn::snvd::Snvd::build(&graph)?;
                    vd.save(out, &graph)?;
                    let frac = vd.border_fraction(&graph);
                    println!("snvd: {} cells, {} border points ({:.2}% of vertices)", vd.cells().count(), vd.border_count(), frac * 100.0);
                    if frac >= 0.05 {
                        eprintln!("warning: border points exceed 5% of vertices");
                    }
                }
                IndexKind::Rtree => {
                    let rt = ksnn::rtree::PoiSpatialIndex::build(&graph)?;
                    rt.save(out, &graph)?;
                    println!("rtree: {} POIs", rt.len());
                }
            }
            println!("built in {:.1} ms, wrote {}", t.elapsed().as_secs_f64() * 1e3, out.display());
            Ok(())
        }
        Cmd::Query { engine, source, k, d_c, delta, rules, verify, max_paths, height_cap } => {
            let graph = load_graph(g)?;
            let engine: EngineKind = engine.parse()?;
            let verify: Option<EngineKind> = verify.map(|v| v.parse()).transpose()?;
            let mut idx = Indexes::default();
            if let Some(path) = &g.index {
                let kind = idx.load_file(path, &graph)?;
                if engine.needs_index() && kind != engine && verify != Some(kind) {
                    bail!("engine {engine} cannot use a {kind} index");
                }
            }
            for e in [Some(engine), verify].into_iter().flatten() {
                let present = match e {
                    EngineKind::Ine => true,
                    EngineKind::Ct => idx.ct.is_some(),
                    EngineKind::Snvd => idx.snvd.is_some(),
                    EngineKind::Rtree => idx.rtree.is_some(),
                };
                if !present {
                    eprintln!("note: building the {e} index in memory");
                    idx.ensure(&graph, e, height_cap)?;
                }
            }
            let d_c = d_c.unwrap_or_else(|| d_c_from_delta(&graph, source, k, delta));
            let q = QuerySpec::new(source, k, d_c);
            let opts = SearchOptions { rules: Rules::parse(&rules)?, max_paths };
            let t = Instant::now();
            let out = idx.run(engine, &graph, &q, &opts)?;
            let ms = t.elapsed().as_secs_f64() * 1e3;
            println!("engine={engine} source={source} k={k} d_c={d_c} rules={}", opts.rules.restrict(engine.rules()));
            println!("# answer");
            print!("{}", out.answer.render());
            if out.answer.len() < k {
                println!("notice: only {} POIs reachable within d_c", out.answer.len());
            }
            println!("# counters");
            println!("time_ms={ms:.3}");
            println!("vertices_accessed={}", out.counters.vertices_accessed);
            println!("valid_paths_explored={}", out.counters.valid_paths_explored);
            if engine == EngineKind::Rtree {
                println!("candidate_searches={}", out.counters.candidate_searches);
            }
            if let Some(other) = verify {
                idx.verify(engine, other, &graph, &q, &opts)?;
                println!("verified against {other}");
            }
            Ok(())
        }
        Cmd::Bench { config } => {
            let mut cfg = match &config {
                Some(p) => BenchConfig::load(p)?,
                None => BenchConfig::default(),
            };
            if let Some(seed) = g.seed {
                cfg.seed = seed;
            }
            let base = match &g.graph {
                Some(_) => Some(load_graph(g)?),
                None => None,
            };
            let rows = harness::run_bench(&cfg, base.as_ref())?;
            write_out(g.out.as_deref(), &harness::bench_csv(&rows)?)
        }
        Cmd::CompareKnn { k, deltas, queries, engine } => {
            let graph = load_graph(g)?;
            let engine: EngineKind = engine.parse()?;
            let mut idx = Indexes::default();
            if let Some(path) = &g.index {
                idx.load_file(path, &graph)?;
            }
            idx.ensure(&graph, engine, None)?;
            let sources = harness::sample_queries(&graph, queries, g.seed.unwrap_or(1));
            let rows = harness::compare_knn(&graph, &idx, engine, &sources, k, &deltas)?;
            write_out(g.out.as_deref(), &harness::knn_csv(&rows)?)
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
