use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use triad_census::gen::{generate, Preset};
use triad_census::kernel::census_sequential;
use triad_census::{CompactDigraph, TriadCodeTable};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triad-census"))
        .args(args)
        .env("RUST_LOG", "info")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn census_of_directed_four_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "cycle.txt", "# 4-cycle\n0 1\n1 2\n2 3\n3 0\n");
    let out = run(&["census", "--input", &input, "--threads", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let counts = &stdout_json(&out)["counts"];
    assert_eq!(counts["021C"], 4);
    assert_eq!(counts["003"], 0);
    assert_eq!(counts["030C"], 0);
    let total: u64 = counts.as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 4);
}

#[test]
fn census_of_directed_triangle_plus_isolated_node() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tri.txt", "0 1\n1 2\n2 0\n");
    let out = run(&["census", "--input", &input, "--nodes", "4", "--format", "csv"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("label,count\n"));
    assert!(csv.contains("030C,1\n"));
    assert!(csv.contains("012,3\n"));
}

#[test]
fn empty_graph_with_explicit_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "empty.txt", "");
    let out = run(&["census", "--input", &input, "--nodes", "3"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["n"], 3);
    assert_eq!(json["counts"]["003"], 1);
}

#[test]
fn self_loops_are_dropped_with_warning_or_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "loop.txt", "0 1\n1 1\n1 2\n");
    let out = run(&["census", "--input", &input]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("dropped 1 self-loop"), "{err}");
    assert!(err.contains("self_loops_dropped=1"));

    let out = run(&["census", "--input", &input, "--self-loops", "reject"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(1, 1)"));
}

#[test]
fn malformed_input_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.txt", "0 1\n2 x\n");
    let out = run(&["census", "--input", &input]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn zero_shards_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "e.txt", "0 1\n");
    let out = run(&["census", "--input", &input, "--shards", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_random_corpus_passes() {
    let out = run(&["verify", "--random", "6", "--max-nodes", "30", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["passed"], true);
    assert_eq!(report["graphs_checked"], 6);
}

#[test]
fn verify_catches_injected_fault() {
    let out = run(&["verify", "--random", "6", "--max-nodes", "40", "--inject-fault", "off-by-one"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["passed"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("first difference"));
}

#[test]
fn verify_refuses_graph_over_cap() {
    let out = run(&["verify", "--model", "uniform", "--nodes", "50", "--arcs", "100", "--cap", "20"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("50"));
}

#[test]
fn bench_single_thread() {
    let out = run(&[
        "bench", "--model", "uniform", "--nodes", "300", "--arcs", "3000", "--threads", "1", "--repeats", "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = stdout_json(&out)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["workers"], 1);
    assert_eq!(rows[0]["times"].as_array().unwrap().len(), 3);
    assert_eq!(rows[0]["speedup"], 1.0);
}

#[test]
fn bench_adds_baseline_and_agrees() {
    let out = run(&[
        "bench", "--model", "powerlaw", "--nodes", "400", "--arcs", "4000", "--threads", "2,3", "--repeats", "1",
        "--format", "csv",
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1,"));
    let sums: Vec<&str> = lines[1..].iter().map(|l| l.rsplit(',').next().unwrap()).collect();
    assert!(sums.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn generate_then_census_matches_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.txt");
    let bin = dir.path().join("g.bin");
    let out = run(&[
        "generate", "--preset", "orkut-like", "--nodes", "2000", "--arcs", "15000", "--seed", "11", "--output",
        edges.to_str().unwrap(), "--save-binary", bin.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut spec = Preset::OrkutLike.spec(11);
    spec.node_count = 2000;
    spec.target_arcs = 15000;
    let g = CompactDigraph::with_nodes(2000, generate(&spec).unwrap().pairs).unwrap();
    let expected = census_sequential(&g, TriadCodeTable::standard()).to_json_pretty() + "\n";

    for input in [&edges, &bin] {
        let out = run(&["census", "--input", input.to_str().unwrap(), "--nodes", "2000", "--threads", "3"]);
        assert!(out.status.success());
        assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
    }
}

#[test]
fn degrees_writes_histogram_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "star.txt", "0 1\n0 2\n0 3\n1 2\n");
    let fit = dir.path().join("fit.json");
    let out = run(&["degrees", "--input", &input, "--k-min", "1", "--fit", fit.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.contains("0,2\n") && csv.contains("1,1\n") && csv.contains("3,1\n"), "{csv}");
    let fit: Value = serde_json::from_str(&fs::read_to_string(fit).unwrap()).unwrap();
    assert!(fit["exponent"].as_f64().unwrap() > 1.0);
}
