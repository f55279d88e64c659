use std::path::PathBuf;
use std::process::{Command, Output};

use convex_completion::io::{parse_graph, parse_metric};
use convex_completion::WeightedGraph;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convex-complete")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("convex-complete-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gen_then_spanner_from_file() {
    let dir = scratch("gen");
    let metric = dir.join("e50.metric");
    let o = bin(&["gen", "--family", "euclidean-random", "--n", "50", "--seed", "1", "--output", metric.to_str().unwrap()]);
    assert!(o.status.success());
    let m = parse_metric(&std::fs::read_to_string(&metric).unwrap()).unwrap();
    assert_eq!(m.len(), 50);

    let out = dir.join("spanner.graph");
    let o = bin(&["spanner", "--input", metric.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("stretch.pass = true"));
    let g: WeightedGraph = parse_graph(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(g.n_vertices(), 50);
    let side = std::fs::read_to_string(dir.join("spanner.graph.sidecar")).unwrap();
    assert_eq!(side.lines().count(), g.n_edges());
    assert!(side.lines().all(|l| l.starts_with("meta ")));
    let json = std::fs::read_to_string(dir.join("spanner.graph.report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["report"]["stretch"]["pass"], true);
}

#[test]
fn complete_tree_writes_tails_and_lifts() {
    let dir = scratch("tree");
    let out = dir.join("star.graph");
    let o = bin(&["complete-tree", "--family", "star", "--n", "6", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("tree_preserved = true"));
    let side = std::fs::read_to_string(dir.join("star.graph.sidecar")).unwrap();
    assert_eq!(side.lines().filter(|l| l.starts_with("lift ")).count(), 6);
    assert!(side.lines().any(|l| l.starts_with("tail ")));
}

#[test]
fn audit_exit_codes() {
    let o = bin(&["audit", "--family", "star", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("long_edge.max = 5\n"));
    let o = bin(&["audit", "--family", "star", "--n", "5", "--epsilon", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["audit", "--family", "lcp", "--p", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["audit", "--input", "/nonexistent/file"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn certificates_from_the_command_line() {
    let o = bin(&["certify-star", "--n", "10", "--epsilon", "0.0009765625"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("size = 9\n"));
    let o = bin(&["certify-star", "--n", "4", "--epsilon", "0.0009765625"]);
    assert_eq!(o.status.code(), Some(1));
    let o = bin(&["certify-lcp", "--p", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("crossing.present = 64\n"));
}

#[test]
fn dim_reports_bounds() {
    let o = bin(&["dim", "--family", "lcp", "--p", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("lambda_upper = 2\n"));
}

#[test]
fn report_batches_are_byte_identical() {
    let runs = [
        "pipeline=spanner epsilon=0.25 family=euclidean-random n=30 seed=2",
        "pipeline=audit-only epsilon=0.25 family=exponential-star n=5",
    ];
    let mut outputs = Vec::new();
    for k in 0..2 {
        let dir = scratch(&format!("report{k}"));
        let mut args = vec!["report", "--output", dir.to_str().unwrap()];
        for r in &runs {
            args.extend(["--run", r]);
        }
        let o = bin(&args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let plot = std::fs::read_to_string(dir.join("plot.tsv")).unwrap();
        let text = std::fs::read_to_string(dir.join("report-000.txt")).unwrap();
        let hashable = text.split("[timings_ms]").next().unwrap().to_string();
        outputs.push((plot, hashable));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(outputs[0].0.starts_with("family\tn\tepsilon\tmetric\tvalue\n"));
}
