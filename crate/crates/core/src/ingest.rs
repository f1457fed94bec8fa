//! File formats, crime-based safety scores and synthetic graphs.
//!
//! Edge file: `u \t v \t length \t ess` per line. POI file: one vertex id per
//! line. Coordinate file: `v \t x \t y`. Blank lines and lines starting with
//! `#` are skipped everywhere, except that an edge file may start with
//! `# vertices=N s_max=S` to fix the vertex count and score range.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{Edge, RoadGraph, VertexId};

#[derive(Clone, Debug, PartialEq)]
pub struct LoadOptions {
    /// Multiplier applied to raw lengths before rounding to integers.
    pub length_scale: f64,
    /// Largest ESS; taken from the edge file when absent.
    pub s_max: Option<u32>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { length_scale: 1.0, s_max: None }
    }
}

#[derive(Clone, Debug)]
pub struct Loaded {
    pub graph: RoadGraph,
    /// Factor raw lengths were multiplied by.
    pub length_scale: f64,
    /// Edges dropped because another edge joined the same pair.
    pub collapsed: usize,
}

fn parse_err<T>(file: &Path, line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { file: file.display().to_string(), line, msg: msg.into() })
}

/// Non-comment lines with their 1-based line numbers, split on whitespace.
fn records(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| (i + 1, l.split_whitespace().map(str::to_string).collect()))
        .collect())
}

fn field<T: std::str::FromStr>(path: &Path, line: usize, rec: &[String], i: usize, name: &str) -> Result<T> {
    match rec.get(i) {
        None => parse_err(path, line, format!("missing {name}")),
        Some(s) => s.parse().or_else(|_| parse_err(path, line, format!("bad {name} {s:?}"))),
    }
}

/// Reads the optional `# vertices=N s_max=S` header of an edge file.
fn header(path: &Path) -> Result<(Option<usize>, Option<u32>)> {
    let text = fs::read_to_string(path)?;
    let Some(first) = text.lines().next().and_then(|l| l.strip_prefix('#')) else {
        return Ok((None, None));
    };
    let (mut n, mut s) = (None, None);
    for tok in first.split_whitespace() {
        if let Some(v) = tok.strip_prefix("vertices=") {
            n = Some(v.parse().or_else(|_| parse_err(path, 1, format!("bad vertex count {v:?}")))?);
        } else if let Some(v) = tok.strip_prefix("s_max=") {
            s = Some(v.parse().or_else(|_| parse_err(path, 1, format!("bad s_max {v:?}")))?);
        }
    }
    Ok((n, s))
}

/// `true` if `a` should replace `b` between two edges on one vertex pair:
/// the safer one wins, then the shorter.
fn preferred(a: &Edge, b: &Edge) -> bool {
    (a.ess, std::cmp::Reverse(a.length)) > (b.ess, std::cmp::Reverse(b.length))
}

pub fn load_graph(edges: &Path, pois: Option<&Path>, coords: Option<&Path>, opts: &LoadOptions) -> Result<Loaded> {
    if !(opts.length_scale > 0.0 && opts.length_scale.is_finite()) {
        return domain(format!("length scale {} must be positive", opts.length_scale));
    }
    let (declared_n, declared_s) = header(edges)?;
    let mut raw: Vec<(usize, Edge)> = Vec::new();
    let mut n = declared_n.unwrap_or(0);
    for (line, rec) in records(edges)? {
        if rec.len() != 4 {
            return parse_err(edges, line, format!("expected 4 fields, found {}", rec.len()));
        }
        let u: VertexId = field(edges, line, &rec, 0, "vertex")?;
        let v: VertexId = field(edges, line, &rec, 1, "vertex")?;
        let len: f64 = field(edges, line, &rec, 2, "length")?;
        let ess: u32 = field(edges, line, &rec, 3, "ess")?;
        let scaled = (len * opts.length_scale).round();
        if !(scaled >= 1.0 && scaled <= u32::MAX as f64) {
            return parse_err(edges, line, format!("length {len} does not scale to a positive integer"));
        }
        if ess == 0 {
            return parse_err(edges, line, "ess must be at least 1");
        }
        if u == v {
            return parse_err(edges, line, format!("self-loop at vertex {u}"));
        }
        if let Some(dn) = declared_n {
            if u.max(v) as usize >= dn {
                return parse_err(edges, line, format!("vertex {} beyond the declared {dn}", u.max(v)));
            }
        }
        n = n.max(u as usize + 1).max(v as usize + 1);
        raw.push((line, Edge::new(u, v, scaled as u32, ess)));
    }
    let s_max = match opts.s_max.or(declared_s) {
        Some(s) => s,
        None => raw.iter().map(|(_, e)| e.ess).max().unwrap_or(1),
    };
    if let Some((line, e)) = raw.iter().find(|(_, e)| e.ess > s_max) {
        return parse_err(edges, *line, format!("ess {} exceeds s_max {s_max}", e.ess));
    }

    let mut poi_ids = Vec::new();
    if let Some(p) = pois {
        for (line, rec) in records(p)? {
            let v: VertexId = field(p, line, &rec, 0, "vertex")?;
            n = n.max(v as usize + 1);
            poi_ids.push((line, v));
        }
    }
    let mut coord_rows = Vec::new();
    if let Some(c) = coords {
        for (line, rec) in records(c)? {
            let v: VertexId = field(c, line, &rec, 0, "vertex")?;
            let x: f64 = field(c, line, &rec, 1, "x")?;
            let y: f64 = field(c, line, &rec, 2, "y")?;
            n = n.max(v as usize + 1);
            coord_rows.push((line, v, x, y));
        }
    }

    let mut best: HashMap<(VertexId, VertexId), Edge> = HashMap::new();
    let mut collapsed = 0;
    for (_, e) in &raw {
        match best.get(&(e.u, e.v)) {
            Some(cur) => {
                collapsed += 1;
                if preferred(e, cur) {
                    best.insert((e.u, e.v), *e);
                }
            }
            None => {
                best.insert((e.u, e.v), *e);
            }
        }
    }
    let mut kept: Vec<Edge> = best.into_values().collect();
    kept.sort_by_key(|e| (e.u, e.v));
    let mut graph = RoadGraph::new(n, s_max)?;
    for e in kept {
        graph.add_edge(e)?;
    }
    if let Some(p) = pois {
        for (line, v) in poi_ids {
            if graph.is_poi(v) {
                return parse_err(p, line, format!("duplicate POI {v}"));
            }
            graph.add_poi(v)?;
        }
    }
    if let Some(c) = coords {
        let mut xy = vec![None; n];
        for (line, v, x, y) in coord_rows {
            if xy[v as usize].replace((x, y)).is_some() {
                return parse_err(c, line, format!("duplicate coordinates for vertex {v}"));
            }
        }
        let missing = xy.iter().position(Option::is_none);
        if let Some(v) = missing {
            return parse_err(c, 0, format!("no coordinates for vertex {v}"));
        }
        let xy: Vec<(f64, f64)> = xy.into_iter().map(|p| p.expect("checked above")).collect();
        // Coordinates are in raw length units.
        graph.set_coords(xy.iter().map(|&(x, y)| (x * opts.length_scale, y * opts.length_scale)).collect())?;
        graph.check_embedding()?;
    }
    Ok(Loaded { graph, length_scale: opts.length_scale, collapsed })
}

/// Writes the graph in the three text formats; `coords` is written only
/// when the graph has coordinates.
pub fn save_graph(graph: &RoadGraph, edges: &Path, pois: Option<&Path>, coords: Option<&Path>) -> Result<()> {
    let mut f = fs::File::create(edges)?;
    writeln!(f, "# vertices={} s_max={}", graph.vertex_count(), graph.s_max())?;
    for e in graph.edges() {
        writeln!(f, "{}\t{}\t{}\t{}", e.u, e.v, e.length, e.ess)?;
    }
    if let Some(p) = pois {
        let mut f = fs::File::create(p)?;
        for v in graph.pois() {
            writeln!(f, "{v}")?;
        }
    }
    if let (Some(c), Some(xy)) = (coords, graph.coords()) {
        let mut f = fs::File::create(c)?;
        for (v, (x, y)) in xy.iter().enumerate() {
            writeln!(f, "{v}\t{x}\t{y}")?;
        }
    }
    Ok(())
}

/// How crime records are turned into planar points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CrimeProjection {
    /// Columns `x,y` in graph coordinate units.
    Planar,
    /// Columns `lat,lon` in degrees, projected equirectangularly around
    /// `ref_lat` to metres.
    Equirectangular { ref_lat: f64 },
}

const EARTH_RADIUS_M: f64 = 6_371_000.0;

pub fn project(lat: f64, lon: f64, ref_lat: f64) -> (f64, f64) {
    let (lat, lon) = (lat.to_radians(), lon.to_radians());
    (EARTH_RADIUS_M * lon * ref_lat.to_radians().cos(), EARTH_RADIUS_M * lat)
}

pub fn load_crimes(path: &Path, projection: CrimeProjection) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_ascii_lowercase()).collect();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (a, b, geo) = match (col("x"), col("y"), col("lat"), col("lon")) {
        (Some(x), Some(y), _, _) => (x, y, false),
        (_, _, Some(lat), Some(lon)) => (lat, lon, true),
        _ => return parse_err(path, 1, "header needs x,y or lat,lon"),
    };
    if geo && projection == CrimeProjection::Planar {
        return parse_err(path, 1, "lat,lon columns need an equirectangular projection");
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let get = |j: usize| -> Result<f64> {
            let s = rec.get(j).unwrap_or("").trim();
            s.parse().or_else(|_| parse_err(path, line, format!("bad number {s:?}")))
        };
        let (p, q) = (get(a)?, get(b)?);
        out.push(match projection {
            CrimeProjection::Equirectangular { ref_lat } if geo => project(p, q, ref_lat),
            _ => (p, q),
        });
    }
    Ok(out)
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

/// Crime score in `[1, s_max]` for each count: equal-width bins over
/// `[min, max]`, with all-equal counts mapping to 1.
pub fn crime_scores(counts: &[u64], s_max: u32) -> Vec<u32> {
    let (Some(&lo), Some(&hi)) = (counts.iter().min(), counts.iter().max()) else {
        return Vec::new();
    };
    counts
        .iter()
        .map(|&c| {
            if hi == lo {
                1
            } else {
                let bin = ((c - lo) as u128 * s_max as u128 / (hi - lo) as u128) as u32;
                bin.min(s_max - 1) + 1
            }
        })
        .collect()
}

/// Edge crime counts: incidents within `radius` of the straight segment
/// between the edge's endpoints, in edge order.
pub fn crime_counts(graph: &RoadGraph, crimes: &[(f64, f64)], radius: f64) -> Result<Vec<u64>> {
    let Some(xy) = graph.coords() else {
        return domain("crime scores need vertex coordinates");
    };
    // Bucket crimes on a grid of cell size `radius` so each edge only scans
    // cells within reach of its bounding box.
    let cell = radius.max(f64::MIN_POSITIVE);
    let key = |p: (f64, f64)| ((p.0 / cell).floor() as i64, (p.1 / cell).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<(f64, f64)>> = HashMap::new();
    for &c in crimes {
        buckets.entry(key(c)).or_default().push(c);
    }
    let edges: Vec<Edge> = graph.edges().collect();
    Ok(crate::par::map_any(&edges, |e| {
        let (a, b) = (xy[e.u as usize], xy[e.v as usize]);
        let lo = key((a.0.min(b.0) - radius, a.1.min(b.1) - radius));
        let hi = key((a.0.max(b.0) + radius, a.1.max(b.1) + radius));
        let mut n = 0u64;
        for gx in lo.0..=hi.0 {
            for gy in lo.1..=hi.1 {
                if let Some(pts) = buckets.get(&(gx, gy)) {
                    n += pts.iter().filter(|&&p| point_segment_distance(p, a, b) <= radius).count() as u64;
                }
            }
        }
        n
    }))
}

/// Copy of `graph` with `s_max` replaced and every ESS set to
/// `s_max + 1 - crime score`.
pub fn assign_ess(graph: &RoadGraph, crimes: &[(f64, f64)], radius: f64, s_max: u32) -> Result<RoadGraph> {
    if s_max == 0 {
        return domain("s_max must be positive");
    }
    if radius.is_nan() || radius < 0.0 {
        return domain(format!("radius {radius} must be non-negative"));
    }
    let counts = crime_counts(graph, crimes, radius)?;
    let scores = crime_scores(&counts, s_max);
    let mut out = RoadGraph::new(graph.vertex_count(), s_max)?;
    for (e, score) in graph.edges().zip(scores) {
        out.add_edge(Edge::new(e.u, e.v, e.length, s_max + 1 - score))?;
    }
    for &p in graph.pois() {
        out.add_poi(p)?;
    }
    if let Some(xy) = graph.coords() {
        out.set_coords(xy.to_vec())?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// `rows x cols` lattice with unit spacing of 10.
    Grid { rows: usize, cols: usize },
    /// `n` uniform points in a square, each joined to its `degree` nearest
    /// neighbours, with extra edges joining any separate components.
    Random { n: usize, degree: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub shape: Shape,
    /// POIs per vertex.
    pub rho: f64,
    /// ESS values are drawn uniformly from `[1, s_max]`.
    pub s_max: u32,
    pub seed: u64,
}

const GRID_SPACING: f64 = 10.0;

pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<RoadGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (coords, pairs) = match spec.shape {
        Shape::Grid { rows, cols } => {
            if rows == 0 || cols == 0 {
                return domain("grid needs at least one row and column");
            }
            let coords: Vec<(f64, f64)> = (0..rows * cols)
                .map(|i| ((i % cols) as f64 * GRID_SPACING, (i / cols) as f64 * GRID_SPACING))
                .collect();
            let mut pairs = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    let v = r * cols + c;
                    if c + 1 < cols {
                        pairs.push((v, v + 1));
                    }
                    if r + 1 < rows {
                        pairs.push((v, v + cols));
                    }
                }
            }
            (coords, pairs)
        }
        Shape::Random { n, degree } => {
            if n == 0 || degree == 0 {
                return domain("random graph needs vertices and a positive degree");
            }
            random_geometric(&mut rng, n, degree)
        }
    };
    let n = coords.len();
    let count = (spec.rho * n as f64).round() as usize;
    if !(spec.rho > 0.0 && spec.rho <= 1.0) || count == 0 {
        return domain(format!("POI density {} gives no POIs on {n} vertices", spec.rho));
    }
    let mut g = RoadGraph::new(n, spec.s_max)?;
    for (a, b) in pairs {
        let (p, q) = (coords[a], coords[b]);
        let d = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
        // Roads are never straighter than the crow flies; add up to 50% detour.
        let length = (d * rng.gen_range(1.0..1.5)).ceil().max(1.0) as u32;
        let ess = rng.gen_range(1..=spec.s_max);
        g.add_edge(Edge::new(a as VertexId, b as VertexId, length, ess))?;
    }
    let mut pois: Vec<usize> = sample(&mut rng, n, count).into_vec();
    pois.sort_unstable();
    for p in pois {
        g.add_poi(p as VertexId)?;
    }
    g.set_coords(coords)?;
    Ok(g)
}

type Layout = (Vec<(f64, f64)>, Vec<(usize, usize)>);

fn random_geometric(rng: &mut ChaCha8Rng, n: usize, degree: usize) -> Layout {
    let side = (n as f64).sqrt() * GRID_SPACING;
    let coords: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(0.0..side), rng.gen_range(0.0..side))).collect();
    let dist = |a: usize, b: usize| {
        let (p, q) = (coords[a], coords[b]);
        (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)
    };
    // Bucket grid with one point per cell on average.
    let cells = (n as f64).sqrt().ceil().max(1.0) as usize;
    let size = side / cells as f64;
    let cell_of = |p: (f64, f64)| {
        (((p.0 / size) as usize).min(cells - 1), ((p.1 / size) as usize).min(cells - 1))
    };
    let mut grid = vec![Vec::new(); cells * cells];
    for (i, &p) in coords.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        grid[cy * cells + cx].push(i);
    }
    let mut pairs = std::collections::BTreeSet::new();
    let want = degree.min(n - 1);
    for (i, &p) in coords.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        let mut ring = 1usize;
        let near = loop {
            let mut cand: Vec<usize> = Vec::new();
            for y in cy.saturating_sub(ring)..=(cy + ring).min(cells - 1) {
                for x in cx.saturating_sub(ring)..=(cx + ring).min(cells - 1) {
                    cand.extend(grid[y * cells + x].iter().copied().filter(|&j| j != i));
                }
            }
            // Points inside `ring - 1` cells are certainly closer than any
            // point outside the scanned square.
            cand.sort_by(|&a, &b| dist(i, a).total_cmp(&dist(i, b)).then(a.cmp(&b)));
            let safe = ((ring - 1) as f64 * size).powi(2);
            if (cand.len() >= want && dist(i, cand[want - 1]) <= safe) || ring >= cells {
                cand.truncate(want);
                break cand;
            }
            ring += 1;
        };
        for j in near {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    // Join components: link each later component to its nearest vertex in
    // the component of vertex 0.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &(a, b) in &pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    let main: Vec<usize> = (0..n).filter(|&b| roots[b] == roots[0]).collect();
    let mut linked = vec![false; n];
    linked[roots[0]] = true;
    for i in 0..n {
        if linked[roots[i]] {
            continue;
        }
        linked[roots[i]] = true;
        let mut best = (f64::INFINITY, 0, 0);
        for a in (0..n).filter(|&a| roots[a] == roots[i]) {
            for &b in &main {
                let d = dist(a, b);
                if d < best.0 {
                    best = (d, a, b);
                }
            }
        }
        pairs.insert((best.1.min(best.2), best.1.max(best.2)));
    }
    (coords, pairs.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn three_line_edge_file() {
        let dir = tempfile::tempdir().unwrap();
        let e = write(dir.path(), "g.tsv", "# header\n0\t1\t3\t2\n1\t2\t4\t1\n\n2\t0\t5\t3\n");
        let g = load_graph(&e, None, None, &LoadOptions::default()).unwrap().graph;
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.s_max(), 3);
        assert_eq!(g.vertex_count(), 3);
    }

    #[test]
    fn zero_ess_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let e = write(dir.path(), "g.tsv", "0\t1\t3\t2\n1\t2\t4\t0\n");
        let err = load_graph(&e, None, None, &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn multi_edges_keep_safer_then_shorter() {
        let dir = tempfile::tempdir().unwrap();
        let e = write(dir.path(), "g.tsv", "0\t1\t3\t2\n1\t0\t9\t3\n0\t1\t5\t3\n");
        let l = load_graph(&e, None, None, &LoadOptions::default()).unwrap();
        assert_eq!(l.collapsed, 2);
        let kept = l.graph.edge(0, 1).unwrap();
        assert_eq!((kept.length, kept.ess), (5, 3));
    }

    #[test]
    fn lengths_are_scaled_and_embedding_checked() {
        let dir = tempfile::tempdir().unwrap();
        let e = write(dir.path(), "g.tsv", "0\t1\t1.26\t1\n");
        let c = write(dir.path(), "c.tsv", "0\t0\t0\n1\t1.2\t0\n");
        let opts = LoadOptions { length_scale: 100.0, s_max: Some(4) };
        let g = load_graph(&e, None, Some(&c), &opts).unwrap().graph;
        assert_eq!(g.edge(0, 1).unwrap().length, 126);
        let c = write(dir.path(), "c2.tsv", "0\t0\t0\n1\t2\t0\n");
        assert!(load_graph(&e, None, Some(&c), &opts).is_err());
    }

    #[test]
    fn crime_scores_cover_the_range() {
        assert_eq!(crime_scores(&[0, 0, 0], 5), vec![1, 1, 1]);
        assert_eq!(crime_scores(&[0, 5, 10], 10), vec![1, 6, 10]);
    }

    #[test]
    fn zero_crimes_give_the_safest_score() {
        let g = gen_synthetic(&SyntheticSpec { shape: Shape::Grid { rows: 3, cols: 3 }, rho: 0.2, s_max: 5, seed: 1 })
            .unwrap();
        let out = assign_ess(&g, &[], 1000.0, 5).unwrap();
        assert!(out.edges().all(|e| e.ess == 5));
    }

    #[test]
    fn heaviest_crime_edge_gets_score_one() {
        let g = gen_synthetic(&SyntheticSpec { shape: Shape::Grid { rows: 1, cols: 3 }, rho: 0.4, s_max: 10, seed: 1 })
            .unwrap();
        // Three incidents next to the first edge, none near the second.
        let crimes = [(5.0, 1.0), (4.0, -1.0), (1.0, 0.5)];
        let out = assign_ess(&g, &crimes, 2.0, 10).unwrap();
        assert_eq!(out.edge(0, 1).unwrap().ess, 1);
        assert_eq!(out.edge(1, 2).unwrap().ess, 10);
    }

    #[test]
    fn grid_sizes_and_determinism() {
        let spec = SyntheticSpec { shape: Shape::Grid { rows: 10, cols: 10 }, rho: 0.1, s_max: 5, seed: 9 };
        let g = gen_synthetic(&spec).unwrap();
        assert_eq!(g.vertex_count(), 100);
        assert_eq!(g.pois().len(), 10);
        assert_eq!(g.content_hash(), gen_synthetic(&spec).unwrap().content_hash());
        g.check_embedding().unwrap();
        let bad = SyntheticSpec { rho: 0.001, ..spec };
        assert!(gen_synthetic(&bad).is_err());
    }

    #[test]
    fn random_graph_is_connected_and_embedded() {
        let spec = SyntheticSpec { shape: Shape::Random { n: 300, degree: 3 }, rho: 0.05, s_max: 4, seed: 3 };
        let g = gen_synthetic(&spec).unwrap();
        g.check_embedding().unwrap();
        let (dist, _) = crate::dijkstra::shortest_distances(&g, &[0], |_, _| true, |_, _| false);
        assert!(dist.iter().all(|&d| d != crate::dijkstra::UNREACHED));
    }
}
