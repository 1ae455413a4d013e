use std::path::{Path, PathBuf};
use std::process::Command;

use jsonschema::JSONSchema;
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn irelab(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_irelab"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn schema(name: &str) -> JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    JSONSchema::compile(&v).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn assert_valid(schema_name: &str, v: &Value) {
    let s = schema(schema_name);
    if let Err(errors) = s.validate(v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{schema_name}: {msgs:?}");
    };
}

/// Runs a command expected to succeed and checks both the envelope and its
/// result against their schemas.
fn envelope(args: &[&str], result_schema: &str) -> Value {
    let r = irelab(args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_valid("envelope", &v);
    assert_valid(result_schema, &v["result"]);
    v
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const C8: &str = "0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 0\n";
const K5: &str = "0 1\n0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n";

#[test]
fn fire_verify_with_oracle() {
    let v = envelope(
        &["fire-verify", "--cell-set", "explicit:0,1", "--delta", "0.5", "--samples", "20000", "--oracle"],
        "fire-verify",
    );
    let o = &v["result"]["oracle"];
    assert!((o["prob_exact"].as_f64().unwrap() - 0.4375).abs() < 1e-12);
    assert!((o["size_exact"].as_f64().unwrap() - 0.8125).abs() < 1e-12);
    assert_eq!(v["result"]["all_pass"], true);
    assert_eq!(v["seed"], 0);
}

#[test]
fn bvt_commands_match_schemas() {
    let s = envelope(&["bvt", "sample", "--p", "0.5", "--samples", "5", "--seed", "3"], "bvt-sample");
    assert_eq!(s["result"]["cells"].as_array().unwrap().len(), 5);
    assert_eq!(s["seed"], 3);
    let i = envelope(&["bvt", "intensity-check", "--p", "0.5", "--samples", "2000"], "bvt-intensity-check");
    assert_eq!(i["result"]["within_4se"], true);
    let h = envelope(&["bvt", "histogram", "--p", "0.5", "--samples", "500"], "bvt-histogram");
    let total: f64 = h["result"]["masses"].as_object().unwrap().values().map(|m| m.as_f64().unwrap()).sum();
    assert!((total + h["result"]["undetermined_fraction"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let n = envelope(&["bvt", "nbhd", "--p", "0.5", "--samples", "200", "--radius", "1"], "neighborhood-distribution");
    assert_eq!(n["result"]["total"], 200);
}

#[test]
fn histogram_csv() {
    let r = irelab(&["bvt", "histogram", "--p", "0.5", "--samples", "300", "--format", "csv"]);
    assert_eq!(r.code, 0);
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next(), Some("size,mass"));
    assert!(lines.last().unwrap().starts_with("undetermined,"));
}

#[test]
fn graph_commands_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let c8 = write(dir.path(), "c8.txt", C8);
    let k5 = write(dir.path(), "k5.txt", K5);
    let c8 = c8.to_str().unwrap();
    let k5 = k5.to_str().unwrap();

    let h = envelope(
        &["graph", "hyperfinite", "--input", c8, "--epsilon", "0.5", "--k", "2"],
        "graph-hyperfinite",
    );
    assert_eq!(h["result"]["verdict"], true);
    assert_eq!(h["result"]["optimal_cut_size"], 4);
    let g = envelope(
        &["graph", "hyperfinite", "--input", c8, "--epsilon", "0.5", "--k", "2", "--mode", "greedy"],
        "graph-hyperfinite",
    );
    assert_eq!(g["result"]["heuristic"], true);

    let e = envelope(&["graph", "expansion", "--input", c8, "--N", "4"], "graph-expansion");
    assert_eq!(e["result"]["kappa"].as_f64(), Some(0.5));

    let rb = envelope(
        &["graph", "robustness", "--input", k5, "--kappa", "2", "--N", "2", "--epsilon", "0.1"],
        "graph-robustness",
    );
    assert_eq!(rb["result"]["passes"], true);
    assert_eq!(rb["result"]["mode"]["kind"], "exhaustive");

    let csv = irelab(&["graph", "expansion", "--input", c8, "--N", "2", "--format", "csv"]);
    assert_eq!(csv.code, 0);
    assert_eq!(csv.stdout, "size,boundary,ratio,witness\n1,2,2,0\n2,2,1,0 1\n");
}

#[test]
fn bs_distance_between_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let run = |p: &str, radius: &str, out: &str| {
        let r = irelab(&["bvt", "nbhd", "--p", p, "--samples", "300", "--radius", radius, "--output", out]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert!(r.stdout.is_empty());
    };
    let (a, a1) = (path("a.json"), path("a1.json"));
    run("0.5", "1", &a);
    run("0.5", "2", &a1);

    let same = envelope(&["bs-distance", &a, &a], "bs-distance");
    assert_eq!(same["result"]["tv_distance"].as_f64(), Some(0.0));

    // A distribution concentrated on one type is at distance 1 from one
    // that never sees that type.
    let text = std::fs::read_to_string(&a).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let entries = v["result"]["entries"].as_array().unwrap().clone();
    let (first, rest) = entries.split_first().unwrap();
    let keep = |e: Vec<Value>| {
        let total: u64 = e.iter().map(|x| x["count"].as_u64().unwrap()).sum();
        let mut r = v["result"].clone();
        r["entries"] = Value::Array(e);
        r["total"] = total.into();
        r
    };
    let only_first = keep(vec![first.clone()]);
    let others = keep(rest.to_vec());
    assert_valid("neighborhood-distribution", &only_first);
    let (x, y) = (path("x.json"), path("y.json"));
    std::fs::write(&x, only_first.to_string()).unwrap();
    std::fs::write(&y, others.to_string()).unwrap();
    let far = envelope(&["bs-distance", &x, &y], "bs-distance");
    assert_eq!(far["result"]["tv_distance"].as_f64(), Some(1.0));

    let mismatch = irelab(&["bs-distance", &a, &a1]);
    assert_eq!(mismatch.code, 2);
    assert!(mismatch.stdout.is_empty());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.conf", "# defaults\nsamples = 40\nseed=7\np=0.5\n");
    let cfg = cfg.to_str().unwrap();
    let from_file = envelope(&["--config", cfg, "bvt", "histogram"], "bvt-histogram");
    assert_eq!(from_file["seed"], 7);
    assert_eq!(from_file["config"]["samples"], 40);
    let overridden = envelope(&["--config", cfg, "bvt", "histogram", "--seed", "9"], "bvt-histogram");
    assert_eq!(overridden["seed"], 9);
    assert_eq!(overridden["config"]["samples"], 40);

    let bad = write(dir.path(), "bad.conf", "samples=40\nthis line is wrong\n");
    let r = irelab(&["--config", bad.to_str().unwrap(), "bvt", "histogram"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);
}

#[test]
fn exit_codes() {
    // Invalid input.
    assert_eq!(irelab(&["fire-verify", "--cell-set", "explicit:0,1", "--delta", "0.6"]).code, 2);
    assert_eq!(irelab(&["bvt", "sample", "--p", "1.0"]).code, 2);
    assert_eq!(irelab(&["no-such-command"]).code, 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "0 1\n1 x\n");
    let r = irelab(&["graph", "expansion", "--input", bad.to_str().unwrap(), "--N", "2"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"));
    let c8 = write(dir.path(), "c8.txt", C8);
    let r = irelab(&[
        "graph", "robustness", "--input", c8.to_str().unwrap(), "--kappa", "0.5", "--N", "4", "--epsilon", "0.2",
    ]);
    assert_eq!(r.code, 2, "epsilon above the threshold");

    // Verification failure: an r_max too small to determine any cell.
    let r = irelab(&["bvt", "intensity-check", "--p", "0.05", "--rmax", "2", "--samples", "2000"]);
    assert_eq!(r.code, 1);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_valid("bvt-intensity-check", &v["result"]);
    assert_eq!(v["result"]["warning"], true);

    // Exact computation out of reach.
    let r = irelab(&["fire-verify", "--group", "f:2", "--cell-set", "ball:1", "--delta", "0.1", "--samples", "1000", "--oracle"]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("infeasible"));

    assert_eq!(irelab(&["--help"]).code, 0);
}

#[test]
fn worker_count_does_not_change_output() {
    let base = ["bvt", "nbhd", "--p", "0.3", "--samples", "500", "--seed", "11"];
    let one = irelab(&[&["--workers", "1"], &base[..]].concat());
    let four = irelab(&[&["--workers", "4"], &base[..]].concat());
    assert_eq!(one.code, 0);
    assert_eq!(one.stdout, four.stdout);
}
