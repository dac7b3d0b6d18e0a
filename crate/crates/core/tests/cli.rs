use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn riesz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riesz"))
        .args(args)
        .env_remove("RIESZ_CAP")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn keys(v: &Value) -> BTreeSet<&str> {
    v.as_object().unwrap().keys().map(String::as_str).collect()
}

fn assert_keys(v: &Value, expected: &[&str]) {
    let want: BTreeSet<&str> = expected.iter().copied().collect();
    assert_eq!(keys(v), want);
}

#[test]
fn solve_tree_six_taxa() {
    let out = riesz(&["solve-tree", &data("six_taxa.json"), "-k", "3", "-s", "1"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_keys(&v, &["energy", "indices", "k", "s", "subset"]);
    assert!((v["energy"].as_f64().unwrap() - 3.0 / 11.0).abs() < 1e-9);
    assert_eq!(v["subset"], serde_json::json!(["a", "c", "e"]));
}

#[test]
fn solve_tree_accepts_newick_and_matrices() {
    let a = riesz(&["solve-tree", &data("six_taxa.nwk"), "-k", "4", "-s", "2"]);
    let b = riesz(&["solve-tree", &data("six_taxa.json"), "-k", "4", "-s", "2"]);
    assert_eq!(a.stdout, b.stdout);
    // A non-ultrametric matrix is refused as input.
    let c = riesz(&["solve-tree", &data("tiny.json"), "-k", "2"]);
    assert_eq!(c.status.code(), Some(1));
}

#[test]
fn solve_tree_table_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = riesz(&["solve-tree", &data("six_taxa.json"), "-k", "3", "--table", path.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("node,t,F\n"));
    assert!(csv.contains(",inf"));
}

#[test]
fn energy_of_a_cherry_subset() {
    let out = riesz(&["energy", &data("six_taxa.json"), "--subset", "a,b,e"]);
    let v = json_of(&out);
    assert_keys(&v, &["energy", "s", "subset"]);
    assert!((v["energy"].as_f64().unwrap() - 25.0 / 77.0).abs() < 1e-9);
    let by_index = riesz(&["energy", &data("six_taxa.json"), "--subset", "0,1,4"]);
    assert_eq!(by_index.stdout, out.stdout);
    let unknown = riesz(&["energy", &data("six_taxa.json"), "--subset", "a,zz"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn brute_singleton_and_mpd() {
    let v = json_of(&riesz(&["brute", &data("tiny.json"), "-k", "1", "-s", "2"]));
    assert_keys(&v, &["enumerated", "k", "objective", "optimum", "s", "witnesses"]);
    assert_eq!(v["optimum"], serde_json::json!(0));
    let v = json_of(&riesz(&["brute", &data("tiny.json"), "-k", "1", "--mpd"]));
    assert_eq!(v["optimum"], serde_json::json!("inf"));
    let v = json_of(&riesz(&["brute", &data("tiny.json"), "-k", "2", "--mpd"]));
    assert_eq!(v["optimum"], serde_json::json!(2));
    assert_eq!(v["witnesses"], serde_json::json!([["p", "r"]]));
}

#[test]
fn cap_exceeded_exits_3() {
    let out = riesz(&["brute", &data("six_taxa.json"), "-k", "3", "--cap", "5"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_riesz"))
        .args(["brute", &data("six_taxa.json"), "-k", "3"])
        .env("RIESZ_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_refuses_large_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("path13.txt");
    let edges: String = (0..12).map(|i| format!("{i} {}\n", i + 1)).collect();
    std::fs::write(&path, edges).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(riesz(&["reduce-clique", p, "-k", "3", "--verify"]).status.code(), Some(3));
    assert!(riesz(&["reduce-clique", p, "-k", "3"]).status.success());
}

#[test]
fn reduce_clique_triangle() {
    let v = json_of(&riesz(&["reduce-clique", &data("triangle.txt"), "-k", "3", "-s", "2", "--verify"]));
    assert_keys(
        &v,
        &["T", "clique", "decision", "distances", "equivalent", "k", "min_energy", "minimizer", "n", "s"],
    );
    assert_eq!(v["T"], serde_json::json!(0.75));
    assert_eq!(v["min_energy"], serde_json::json!(0.75));
    assert_eq!(v["equivalent"], serde_json::json!(true));
}

#[test]
fn reduce_clique_petersen_has_no_triangle() {
    let v = json_of(&riesz(&["reduce-clique", &data("petersen.json"), "-k", "3", "--verify"]));
    assert_eq!(v["clique"], Value::Null);
    assert_eq!(v["decision"], serde_json::json!(false));
    assert_eq!(v["equivalent"], serde_json::json!(true));
}

#[test]
fn reduce_gis_grid() {
    let v = json_of(&riesz(&["reduce-gis", &data("grid3.json"), "--verify"]));
    assert_eq!(v["s"], serde_json::json!(7));
    assert_eq!(v["separated"], serde_json::json!(true));
    assert_eq!(v["equivalent"], serde_json::json!(true));
    assert_eq!(v["threshold_separates"], serde_json::json!(true));
    // Shrinking delta below the grid spacing empties the forbidden class.
    let v = json_of(&riesz(&["reduce-gis", &data("grid3.json"), "--delta", "0.5"]));
    assert_eq!(v["trivial"], serde_json::json!(true));
    assert_eq!(v["answer"], serde_json::json!(true));
}

#[test]
fn large_s_square() {
    let v = json_of(&riesz(&["large-s", &data("square.csv"), "-k", "2", "--verify"]));
    assert!((v["D_star"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-11);
    assert_eq!(v["R"], serde_json::json!(1));
    // log 1 / log sqrt 2 = 0
    assert_eq!(v["s0"], serde_json::json!(0));
    assert_eq!(v["all_mpd_optimal"], serde_json::json!(true));
}

#[test]
fn mpd_line_methods() {
    for method in ["dp", "search"] {
        let v = json_of(&riesz(&["mpd-line", &data("line.json"), "-k", "3", "--method", method]));
        assert_keys(&v, &["k", "method", "subset", "value"]);
        assert_eq!(v["value"], serde_json::json!(3));
        assert_eq!(v["subset"], serde_json::json!([0, 2, 3]));
    }
    let v = json_of(&riesz(&["mpd-line", &data("line.json"), "-k", "3", "--tau", "4"]));
    assert_eq!(v["feasible"], serde_json::json!(false));
}

#[test]
fn validate_reports() {
    let bad = riesz(&["validate", &data("broken.json")]);
    assert_eq!(bad.status.code(), Some(2));
    let v = json_of(&bad);
    assert_eq!(v["violations"][0]["axiom"], serde_json::json!("triangle"));
    let good = json_of(&riesz(&["validate", &data("square.csv")]));
    assert_eq!(good["valid"], serde_json::json!(true));
    assert_eq!(good["ultrametric"], serde_json::json!(false));
    let tree = json_of(&riesz(&["validate", &data("six_taxa.nwk")]));
    assert_eq!(tree["kind"], serde_json::json!("tree"));
}

#[test]
fn bounds_report_shape() {
    let out = riesz(&["bounds", "-r", "0.5", "-s", "3", "--layers", "5"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_keys(
        &v,
        &["bound", "layers", "linear_bound", "measured", "points", "r", "s", "slack", "total_energy"],
    );
    assert!(v["slack"].as_f64().unwrap() > 0.0);
    assert_eq!(riesz(&["bounds", "-s", "1.5"]).status.code(), Some(1));
}

#[test]
fn counterexample_is_reproducible() {
    let a = riesz(&["counterexample", "--seed", "9"]);
    let b = riesz(&["counterexample", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["found"], serde_json::json!(true));
    assert!(v["witness"]["gap"].as_f64().unwrap() > 1e-6);
    let v = json_of(&riesz(&["counterexample", "--mpd", "--budget", "300"]));
    assert_eq!(v["found"], serde_json::json!(false));
}

#[test]
fn text_format_matches_json_values() {
    let j = json_of(&riesz(&["mpd-line", &data("line.json"), "-k", "3"]));
    let t = riesz(&["mpd-line", &data("line.json"), "-k", "3", "--format", "text"]);
    let text = String::from_utf8(t.stdout).unwrap();
    for (k, v) in j.as_object().unwrap() {
        let shown = match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        assert!(
            text.lines().any(|l| l.starts_with(k.as_str()) && l.trim_end().ends_with(&shown)),
            "{k} missing from:\n{text}"
        );
    }
}

#[test]
fn threads_do_not_change_output() {
    let a = riesz(&["brute", &data("six_taxa.json"), "-k", "3", "-s", "2"]);
    let b = riesz(&["brute", &data("six_taxa.json"), "-k", "3", "-s", "2", "--threads", "4"]);
    assert_eq!(a.stdout, b.stdout);
}
