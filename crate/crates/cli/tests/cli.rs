use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_superell"))
}

fn curve_file(dir: &Path, name: &str, f: &[&str]) -> PathBuf {
    let p = dir.join(name);
    let body = serde_json::json!({"N": 2, "f": f});
    fs::write(&p, body.to_string()).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json_out(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(o.stderr.trim_ascii()).unwrap()
}

#[test]
fn gaps_three_four() {
    let v = json_out(&run(&["gaps", "3", "4"]));
    assert_eq!(v["gaps"], serde_json::json!([1, 2, 5]));
    assert_eq!(v["genus"], 3);
    assert_eq!(v["format_version"], 1);
}

#[test]
fn catalan_csv() {
    let o = run(&["catalan", "--l-max", "3", "--m-max", "3", "--format", "csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# format_version: 1"));
    assert_eq!(lines.next(), Some("l,m,det,product,equal"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
    // prod over 1 <= i <= j <= 2 of (i + j + 6) / (i + j) = 30
    assert!(rows.contains(&"3,3,30,30,true"));
}

#[test]
fn divpoly_x3_minus_x() {
    let dir = tempfile::tempdir().unwrap();
    let c = curve_file(dir.path(), "e.json", &["0", "-1", "0", "1"]);
    let v = json_out(&run(&["--curve", c.to_str().unwrap(), "divpoly", "--n", "7"]));
    assert_eq!(v["deg"], 24);
    assert_eq!(v["b"], "7");
    assert_eq!(v["invariants_ok"], true);
    assert_eq!(v["coeffs"].as_array().unwrap().len(), 25);
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let c = curve_file(dir.path(), "e.json", &["0", "-1", "0", "1"]);
    let args = ["--curve", c.to_str().unwrap(), "--cache", cache.to_str().unwrap(), "divpoly", "--n", "5"];
    let first = run(&args);
    assert!(first.status.success());
    let files: Vec<PathBuf> = fs::read_dir(&cache).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1);
    assert_eq!(run(&args).stdout, first.stdout);
    fs::write(&files[0], b"{ not json").unwrap();
    let third = run(&args);
    assert!(third.status.success());
    assert_eq!(third.stdout, first.stdout);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let c = curve_file(dir.path(), "e.json", &["2", "0", "0", "1"]);
    let args = ["--curve", c.to_str().unwrap(), "--precision", "128", "identity", "--beta=-1", "--n-list", "3,5"];
    let a = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&[&args[..], &["--workers", "1"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    for r in v["rows"].as_array().unwrap() {
        let res: f64 = r["residual"].as_str().unwrap().parse().unwrap();
        assert!(res.abs() < 1e-30, "{r}");
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let o = run(&["gaps", "2", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read(&out).unwrap(), run(&["gaps", "2", "5"]).stdout);
}

#[test]
fn usage_errors_exit_two() {
    let o = run(&["gaps"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "UsageError");

    let o = run(&["--curve", "/nonexistent/curve.json", "periods"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["module"], "cli");

    let dir = tempfile::tempdir().unwrap();
    let c = curve_file(dir.path(), "g2.json", &["1", "0", "0", "0", "0", "1"]);
    let o = run(&["--curve", c.to_str().unwrap(), "divpoly", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--curve", c.to_str().unwrap(), "--precision", "32", "periods"]);
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"N\": 2, \"f\": [\"1\", \"x\"]}").unwrap();
    let o = run(&["--curve", bad.to_str().unwrap(), "periods"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn computation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let c = curve_file(dir.path(), "e.json", &["0", "-1", "0", "1"]);
    let o = run(&["--curve", c.to_str().unwrap(), "height", "--point", "2,2"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "NotOnCurve");
    assert_eq!(e["module"], "heights");

    let o = run(&["--curve", c.to_str().unwrap(), "chi"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "GenusTooSmall");
}

#[test]
fn torsion_points_have_height_zero() {
    let dir = tempfile::tempdir().unwrap();
    let c = curve_file(dir.path(), "e.json", &["0", "-1", "0", "1"]);
    let v = json_out(&run(&["--curve", c.to_str().unwrap(), "height", "--point", "1,0"]));
    let h: f64 = v["height"].as_str().unwrap().parse().unwrap();
    assert!(h.abs() < 1e-9, "{v}");
    assert_eq!(v["oracle"]["torsion"], true);
}

#[test]
fn eval_branch_rows_agree() {
    let dir = tempfile::tempdir().unwrap();
    let c = curve_file(dir.path(), "e.json", &["0", "-1", "0", "1"]);
    let v = json_out(&run(&["--curve", c.to_str().unwrap(), "eval-branch", "--n-max", "8"]));
    assert_eq!(v["all_equal"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3 * 8);
}
