//! End-to-end runs of the `dcgraphs` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcgraphs")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schema").canonicalize().unwrap()
}

fn assert_valid(schema_file: &str, instance: &Value) {
    let path = schema_dir().join(schema_file);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::options()
        .with_base_uri(format!("file://{}", path.display()))
        .build(&schema)
        .unwrap_or_else(|e| panic!("{schema_file}: {e}"));
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:?}\n{instance}");
}

#[test]
fn count_exact_even() {
    let out = run(&["count-exact", "--degrees", "even", "--n", "4", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_valid("count-exact.schema.json", &v);
    let brute = dcgraphs_oracle::multigraph_weight_brute(
        &dcgraphs::DegreeSet::Even,
        4,
        2,
        &dcgraphs_oracle::EnumerationLimit::default(),
    )
    .unwrap();
    assert_eq!(v["weight"], brute.to_string());
}

#[test]
fn asymptotic_outputs_validate() {
    for cmd in ["count-asymptotic", "sg-estimate"] {
        let out = run(&[cmd, "--degrees", "even", "--n", "1000", "--m", "500"]);
        assert_eq!(out.status.code(), Some(0));
        let v = json_of(&out);
        assert_valid("asymptotic.schema.json", &v);
        assert_eq!(v["regime"], "saddle");
        assert!(v["ln"].as_f64().unwrap().is_finite());
    }
    let out = run(&["sg-estimate", "--degrees", "3", "--n", "10", "--m", "15"]);
    let v = json_of(&out);
    assert_valid("asymptotic.schema.json", &v);
    assert_eq!(v["regime"], "degenerate");
}

#[test]
fn infeasible_instances_exit_2() {
    let out = run(&["sample", "--degrees", "1,3", "--n", "3", "--m", "2", "--seed", "7", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&out);
    assert_valid("infeasible.schema.json", &v);
    assert_eq!(v["feasible"], false);
    for cmd in ["count-exact", "count-asymptotic", "sg-estimate"] {
        let out = run(&[cmd, "--degrees", "min=3", "--n", "4", "--m", "5"]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert_valid("infeasible.schema.json", &json_of(&out));
    }
    // arithmetic allows it, but no single degree in {0,3,4} equals 2
    let out = run(&["count-exact", "--degrees", "0,3,4", "--n", "1", "--m", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["count-exact", "--degrees", "even", "--n", "4"]).status.code(), Some(1));
    assert_eq!(run(&["count-exact", "--degrees", "3,x", "--n", "4", "--m", "2"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["marked", "--degrees", "even", "--n", "2", "--m", "1", "--u", "1/0", "--v", "0"]).status.code(), Some(1));
    assert_eq!(run(&["boltzmann", "--degrees", "min=2", "--n", "4", "--mean", "1.5"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn exhausted_attempts_exit_3() {
    let out = run(&["sample", "--degrees", "2", "--n", "1", "--m", "1", "--max-attempts", "4"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json_of(&out);
    assert_valid("exhausted.schema.json", &v);
    assert_eq!(v["report"]["rejections"], 4);
}

#[test]
fn marked_matches_count_exact() {
    for degrees in ["min=0", "min=1", "even", "odd", "1,3", "2,3"] {
        for (n, m) in [(1, 1), (2, 2), (3, 3), (4, 2), (5, 4)] {
            let (n, m) = (n.to_string(), m.to_string());
            let exact = run(&["count-exact", "--degrees", degrees, "--n", &n, "--m", &m]);
            let marked = run(&["marked", "--degrees", degrees, "--n", &n, "--m", &m, "--u", "0", "--v", "0"]);
            assert_eq!(exact.status.code(), marked.status.code(), "{degrees} {n} {m}");
            if exact.status.code() == Some(0) {
                let mv = json_of(&marked);
                assert_valid("marked.schema.json", &mv);
                assert_eq!(json_of(&exact)["weight"], mv["value"], "{degrees} {n} {m}");
            }
        }
    }
}

#[test]
fn marked_inclusion_exclusion() {
    let out = run(&["marked", "--degrees", "min=0", "--n", "2", "--m", "1", "--u", "-1", "--v", "-1"]);
    assert_eq!(json_of(&out)["value"], "1");
    let out = run(&["marked", "--degrees", "2", "--n", "1", "--m", "1", "--u", "2/3", "--v", "-1"]);
    assert_eq!(json_of(&out)["value"], "0");
}

#[test]
fn sampling_is_deterministic_across_jobs() {
    let base = ["sample", "--degrees", "min=1", "--n", "12", "--m", "10", "--samples", "40", "--seed", "99"];
    let one = run(&[&base[..], &["--jobs", "1"]].concat());
    let four = run(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let other = run(&["sample", "--degrees", "min=1", "--n", "12", "--m", "10", "--samples", "40", "--seed", "100"]);
    assert_ne!(one.stdout, other.stdout);
}

#[test]
fn edgelist_blocks_parse_back() {
    let out = run(&["sample", "--degrees", "2,3", "--n", "8", "--m", "10", "--samples", "5", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let (body, trailer) = text.rsplit_once("# report ").unwrap();
    let report: Value = serde_json::from_str(trailer.trim()).unwrap();
    assert_valid("sample-report.schema.json", &report);
    assert_eq!(report["samples_produced"], 5);
    let blocks: Vec<&str> = body.split("\n\n").filter(|b| !b.trim().is_empty()).collect();
    assert_eq!(blocks.len(), 5);
    let d: dcgraphs::DegreeSet = "2,3".parse().unwrap();
    for block in blocks {
        let g = dcgraphs::Multigraph::parse_edge_list(block).unwrap();
        assert!(g.is_simple());
        assert_eq!(g.edge_count(), 10);
        assert!(g.degrees().iter().all(|&k| d.contains(k)));
    }
}

#[test]
fn json_samples_validate() {
    let out = run(&["sample", "--degrees", "even", "--n", "10", "--m", "8", "--samples", "3", "--format", "json", "--allow-multi"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_valid("samples.schema.json", &v);
    assert_eq!(v["graphs"].as_array().unwrap().len(), 3);
    assert_eq!(v["report"]["rejections"], 0);

    let out = run(&["boltzmann", "--degrees", "even", "--n", "51", "--x", "1.2", "--samples", "4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_valid("samples.schema.json", &v);
    assert_eq!(v["report"]["odd_sum_retries"], 0);
}

#[test]
fn boltzmann_mean_is_tuned() {
    let out = run(&["boltzmann", "--degrees", "min=2", "--n", "2000", "--mean", "3", "--samples", "10", "--format", "json", "--seed", "5"]);
    let v = json_of(&out);
    let mean = v["report"]["mean_degree"].as_f64().unwrap();
    assert!((mean - 3.0).abs() < 0.05, "{mean}");
    assert!((v["report"]["expected_mean_degree"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn output_file_and_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.tsv");
    let out = run(&["sample", "--degrees", "min=1", "--n", "6", "--m", "4", "--samples", "2", "--format", "tsv", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("sample\tu\tv\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 8);
}

#[test]
fn report_table() {
    let out = run(&["report", "--degrees", "even", "--n", "16", "--m", "8", "--steps", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n\tm\tln_exact\tln_asymptotic\trelative_error\tln_simple_estimate");
    let errors: Vec<f64> = lines.map(|l| l.split('\t').nth(4).unwrap().parse().unwrap()).collect();
    assert_eq!(errors.len(), 4);
    assert!(errors.windows(2).all(|w| w[1] < w[0]));
}
