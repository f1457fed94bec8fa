use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ksnn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksnn")).current_dir(dir).args(args).output().expect("run ksnn")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = ksnn(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const GRAPH: [&str; 6] = ["--graph", "g/graph.tsv", "--pois", "g/pois.txt", "--coords", "g/coords.tsv"];

fn with_graph<'a>(args: &[&'a str]) -> Vec<&'a str> {
    args.iter().copied().chain(GRAPH).collect()
}

fn generated() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--rows", "15", "--cols", "15", "--rho", "0.05", "--ess-max", "6", "--seed", "4", "--out", "g"]);
    dir
}

#[test]
fn indexes_built_on_disk_answer_like_the_baseline() {
    let dir = generated();
    let d = dir.path();
    assert!(fs::read_to_string(d.join("g/graph.tsv")).unwrap().starts_with("# vertices=225 s_max=6\n"));
    for (kind, file) in [("ct", "g.ct"), ("snvd", "g.snvd"), ("rtree", "g.rtree")] {
        let built = ok(d, &with_graph(&["build-index", kind, "--out", file]));
        assert!(built.contains("wrote g."), "{built}");
        let answer = ok(d, &with_graph(&["query", "--engine", kind, "--index", file, "--source", "7", "--k", "3", "--verify", "ine"]));
        assert!(answer.contains("# answer") && answer.contains("verified against ine"), "{answer}");
    }
    let a = ok(d, &with_graph(&["query", "--engine", "ct", "--index", "g.ct", "--source", "7", "--k", "3"]));
    let b = ok(d, &with_graph(&["query", "--engine", "snvd", "--index", "g.snvd", "--source", "7", "--k", "3"]));
    let answer = |s: &str| s.split("# counters").next().unwrap().lines().skip(1).map(str::to_string).collect::<Vec<_>>();
    assert_eq!(answer(&a), answer(&b));
}

#[test]
fn mismatched_index_is_an_error() {
    let dir = generated();
    let d = dir.path();
    ok(d, &with_graph(&["build-index", "ct", "--out", "g.ct"]));
    let out = ksnn(d, &with_graph(&["query", "--engine", "snvd", "--index", "g.ct", "--source", "0"]));
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot use a"));

    let out = ksnn(d, &["query", "--source", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--graph"));
}

#[test]
fn bench_and_comparison_write_their_schemas() {
    let dir = generated();
    let d = dir.path();
    fs::write(
        d.join("bench.toml"),
        "seed = 2\nqueries = 5\nengines = [\"ine\", \"ct\"]\n[shape]\nkind = \"grid\"\nrows = 10\ncols = 10\n[defaults]\nk = 2\ndelta = 1.5\ns_max = 4\nrho = 0.1\n",
    )
    .unwrap();
    ok(d, &["bench", "--config", "bench.toml", "--out", "bench.csv"]);
    let bench = fs::read_to_string(d.join("bench.csv")).unwrap();
    let lines: Vec<&str> = bench.lines().collect();
    assert!(lines[0].starts_with("schema,engine,rules,sweep,k,delta"));
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("bench-v1,ine,") && lines[2].starts_with("bench-v1,ct,"));

    let knn = ok(d, &with_graph(&["compare-knn", "--k", "3", "--deltas", "1.5,2", "--queries", "6", "--engine", "ct"]));
    let rows: Vec<&str> = knn.lines().collect();
    assert!(rows[0].starts_with("schema,delta,query,source,d_c"));
    assert_eq!(rows.len(), 1 + 2 * 7);
    assert!(rows[1..].iter().all(|r| r.starts_with("knn-v1,")));
}

#[test]
fn crime_records_rescore_a_graph() {
    let dir = generated();
    let d = dir.path();
    fs::write(d.join("crimes.csv"), "x,y\n20,20\n21,19\n70,70\n").unwrap();
    let out = ok(d, &with_graph(&["assign-ess", "--crimes", "crimes.csv", "--radius", "5", "--ess-max", "3", "--out", "scored"]));
    assert!(out.contains("3 crime records"), "{out}");
    let text = fs::read_to_string(d.join("scored/graph.tsv")).unwrap();
    assert!(text.starts_with("# vertices=225 s_max=3\n"));
    let ess: Vec<u32> = text.lines().skip(1).map(|l| l.split('\t').nth(3).unwrap().parse().unwrap()).collect();
    assert!(ess.contains(&1) && ess.contains(&3));
    assert!(ess.iter().all(|&e| (1..=3).contains(&e)));
}
