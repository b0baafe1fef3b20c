use std::path::PathBuf;

use assert_cmd::Command;
use predicates::str::contains;
use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::cargo_bin("hyperstrata").unwrap();
    cmd.env_remove("HYPERSTRATA_JOBS");
    cmd
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn stdout(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

/// Set `UPDATE_GOLDEN=1` to rewrite the files after an intended output change.
fn check_golden(name: &str, args: &[&str]) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let got = stdout(args);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert!(got == want, "{name} differs from golden output");
}

#[test]
fn golden_families_and_covers() {
    for (n, s) in [("6", "4"), ("8", "4")] {
        check_golden(&format!("cover_enumerate_{n}_{s}.json"), &["cover", "enumerate", "--n", n, "--s", s]);
        check_golden(
            &format!("cover_enumerate_{n}_{s}_reversal.json"),
            &["cover", "enumerate", "--n", n, "--s", s, "--up-to-reversal"],
        );
        check_golden(&format!("cover_solve_{n}_{s}.json"), &["cover", "solve", "--n", n, "--s", s]);
    }
}

#[test]
fn enumerate_listings() {
    assert_eq!(json(&["enumerate", "--kind", "compositions", "--n", "6", "--l", "4"]).as_array().unwrap().len(), 10);
    assert_eq!(json(&["enumerate", "--kind", "partitions", "--n", "4", "--l", "2"]).as_array().unwrap().len(), 2);
    let mm = json(&["enumerate", "--kind", "minmax", "--n", "8", "--s", "4"]);
    assert_eq!(mm["p_min"].as_array().unwrap().len(), 3);
}

#[test]
fn poset_report_and_dot() {
    let facets = "[[1,1,2,2],[1,1,3,1],[1,2,1,2],[1,2,2,1]]";
    let r = json(&["poset", "--facets", facets, "--n", "6", "--s", "4"]);
    assert_eq!(r["potential"], true);
    assert_eq!(r["f"], serde_json::json!([4, 4, 1]));
    assert_eq!(r["h"], serde_json::json!([1, 2, 1]));
    assert_eq!(r["shelling_verified"], true);
    assert_eq!(r["schema"], "1");
    bin()
        .args(["poset", "--facets", facets, "--n", "6", "--s", "4", "--format", "dot"])
        .assert()
        .success()
        .stdout(contains("digraph"));
}

#[test]
fn cover_solve_six_four_is_the_single_known_partition() {
    let r = json(&["cover", "solve", "--n", "6", "--s", "4", "--method", "exact"]);
    assert_eq!(r["solution"], serde_json::json!([[2, 2, 1, 1]]));
    let g = json(&["cover", "solve", "--n", "8", "--s", "4", "--method", "greedy"]);
    assert!(g["size"].as_u64().unwrap() >= 2);
}

#[test]
fn cover_check_and_known() {
    let r = json(&["cover", "check", "--n", "8", "--s", "4", "--partitions", "3,2,2,1;4,2,1,1"]);
    assert_eq!(r["covered"], true);
    let r = json(&["cover", "check", "--n", "8", "--s", "4", "--partitions", "[[5,1,1,1]]"]);
    assert_eq!(r["covered"], false);
    assert_eq!(json(&["cover", "known", "--n", "7"])["covered"], true);
}

#[test]
fn realize_example_polynomials() {
    let h = json(&["realize", "--poly", &data("example1_H.json"), "--s", "3"]);
    assert_eq!(h["realization"]["generic"], false);
    let degenerate: Vec<&Value> = h["realization"]["degenerate"].as_array().unwrap().iter().collect();
    assert!(degenerate.iter().any(|v| v["composition"] == serde_json::json!([3, 3])));
    assert!(h["min_max"].is_null());

    let g = json(&["realize", "--poly", &data("example1_G.json"), "--s", "3"]);
    assert_eq!(g["realization"]["generic"], true);
    assert_eq!(g["min_max"]["passed"], true);
}

#[test]
fn reduce_with_certificate() {
    let r = json(&["reduce", "--system", &data("system.json"), "--n", "3", "--partitions", "2,1", "--certify"]);
    let x = r["reduced"][0]["certificate"].as_array().unwrap();
    let (x1, x2) = (x[0].as_f64().unwrap(), x[1].as_f64().unwrap());
    assert!((2.0 * x1 + x2 - 4.0).abs() < 1e-8);
}

#[test]
fn witness_round_trip() {
    let facets = stdout(&["realize", "--poly", &data("roots5.json"), "--s", "3"]);
    let v: Value = serde_json::from_str(&facets).unwrap();
    let target = v["realization"]["realized_facets"].to_string();
    let w = json(&["witness", "--facets", &target, "--n", "5", "--s", "3", "--seed", "1"]);
    assert_eq!(w["found"], true);
    assert_eq!(w["witness"]["facets"], v["realization"]["realized_facets"]);
}

#[test]
fn exit_codes() {
    // domain errors
    bin().args(["enumerate", "--kind", "compositions", "--n", "3", "--l", "5"]).assert().code(2);
    bin().args(["bounds", "--n", "6", "--s", "4", "--format", "dot"]).assert().code(2);
    bin().args(["cover", "enumerate", "--n", "10", "--s", "5"]).assert().code(2).stderr(contains("--force"));
    // parse errors
    bin().args(["poset", "--facets", "not json", "--n", "6", "--s", "4"]).assert().code(2);
    bin().args(["realize", "--poly", "/nonexistent.json", "--s", "3"]).assert().code(2);
    // structural: not a potential poset
    bin().args(["poset", "--facets", "[[1,1,2,2],[2,1,1,2],[2,2,1,1]]", "--n", "6", "--s", "4"]).assert().code(3);
    // incomplete: budget too small to find every vertex
    bin()
        .args(["realize", "--poly", &data("example1_G.json"), "--s", "3", "--max-iter", "1"])
        .assert()
        .code(4)
        .stdout(contains("partial"));
}

#[test]
fn output_is_deterministic_and_independent_of_jobs() {
    let args = ["realize", "--poly", &data("example1_G.json"), "--s", "3", "--seed", "7"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let with_jobs = bin().args(args).env("HYPERSTRATA_JOBS", "1").output().unwrap();
    assert_eq!(a.as_bytes(), with_jobs.stdout.as_slice());

    let fam = ["cover", "enumerate", "--n", "7", "--s", "4"];
    let one = bin().args(fam).args(["--jobs", "1"]).output().unwrap().stdout;
    let four = bin().args(fam).args(["--jobs", "4"]).output().unwrap().stdout;
    assert_eq!(one, four);
}

#[test]
fn table_format_renders() {
    bin().args(["bounds", "--n", "8", "--s", "4", "--format", "table"]).assert().success().stdout(contains("covering upper        3"));
}
