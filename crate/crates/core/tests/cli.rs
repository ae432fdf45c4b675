use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn acstk(args: &[&str]) -> Output {
    acstk_env(args, &[])
}

fn acstk_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_acstk"));
    cmd.args(args).env_remove("ACSTK_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn acstk")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn rank_of_jb_on_heisenberg() {
    let o = acstk(&["rank", "--algebra", "heis3xR3", "--acs", "jb"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "rank = 1");

    let o = acstk(&["rank", "--algebra", "heis3xR3", "--acs", "ja"]);
    assert_eq!(stdout(&o).trim(), "rank = 0");
}

#[test]
fn fixture_files_match_catalog() {
    let a = acstk(&["--json", "rank", "--algebra", "heis3xR3", "--acs", "jb"]);
    let f = fixture("heis3xR3.json");
    let b = acstk(&["--json", "rank", "--algebra", f.to_str().unwrap(), "--acs", "jb"]);
    let (va, vb): (Value, Value) =
        (serde_json::from_slice(&a.stdout).unwrap(), serde_json::from_slice(&b.stdout).unwrap());
    assert_eq!(va["result"], vb["result"]);
}

#[test]
fn catalog_entry_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("free.json");
    let o = acstk(&["--json", "catalog", "free2step3gen"]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&path, &o.stdout).unwrap();
    let v = acstk(&["validate", "--algebra", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));

    let listing = stdout(&acstk(&["catalog"]));
    for name in ["heis3xR3", "free2step3gen", "ja", "jb", "tE"] {
        assert!(listing.contains(name), "{listing}");
    }
}

#[test]
fn perturb_on_abelian_algebra_fails_search() {
    let o = acstk(&["perturb", "--algebra", "abelian6", "--acs", "jstd6", "--target-rank", "1", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn perturb_reaches_target_rank() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("j.json");
    let o = acstk(&[
        "perturb", "--algebra", "heis3xR3", "--acs", "ja", "--target-rank", "1", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = acstk(&["rank", "--algebra", "heis3xR3", "--acs", out.to_str().unwrap()]);
    assert_eq!(stdout(&r).trim(), "rank = 1");
}

#[test]
fn curve_scan_csv_has_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("profile.csv");
    let o = acstk(&[
        "curve-scan", "--algebra", "heis3xR3", "--curve", "tE", "--grid", "201", "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,rank,sigma_k"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 201);
    assert!(rows[0].starts_with("-9.0000000000000002e-1,"));
}

#[test]
fn json_output_is_thread_count_independent() {
    let args = ["--json", "curve-scan", "--algebra", "free2step3gen", "--curve", "tE", "--grid", "301"];
    let one = acstk_env(&args, &[("ACSTK_THREADS", "1")]);
    let four = acstk_env(&args, &[("ACSTK_THREADS", "4")]);
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);

    let args = ["--json", "--seed", "5", "perturb", "--algebra", "free2step3gen", "--acs", "ja", "--target-rank", "3"];
    let one = acstk_env(&args, &[("ACSTK_THREADS", "1")]);
    let four = acstk_env(&args, &[("ACSTK_THREADS", "4")]);
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn json_envelope_records_configuration() {
    let o = acstk(&["--json", "--seed", "9", "--tol-rank-rel", "1e-6", "invariants", "--algebra", "heis3xR3", "--acs", "ja"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["command"], "invariants");
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["config"]["tol_rank_rel"].as_f64(), Some(1e-6));
    let r = &v["result"];
    for key in ["b1", "h1_ddc", "method_a", "method_b", "rank"] {
        assert!(r.get(key).is_some(), "missing {key}: {r}");
    }
    assert_eq!(r["b1"], 5);
    assert_eq!(r["h1_ddc"], 4);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(acstk(&["bogus"]).status.code(), Some(64));
    assert_eq!(acstk(&["rank", "--algebra", "heis3xR3"]).status.code(), Some(64));
    let o = acstk_env(&["catalog"], &[("ACSTK_THREADS", "abc")]);
    assert_eq!(o.status.code(), Some(64));
    assert_eq!(acstk(&["--help"]).status.code(), Some(0));
}

#[test]
fn jacobi_violation_names_the_triple() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"name":"bad","dim":4,"brackets":[
            {"i":1,"j":2,"k":3,"c":1.0},{"i":2,"j":3,"k":1,"c":1.0},{"i":1,"j":3,"k":1,"c":1.0}]}"#,
    )
    .unwrap();
    let o = acstk(&["validate", "--algebra", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("(e1, e2, e3)"), "{}", stderr(&o));
}

#[test]
fn singular_sample_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.json");
    std::fs::write(
        &path,
        r#"{"j0":[[0,-1],[1,0]],"samples":[
            {"t":0,"l":[[0,0],[0,0]]},{"t":0.5,"l":[[-0.5,0],[0,0.5]]},{"t":1,"l":[[-1,0],[0,1]]}]}"#,
    )
    .unwrap();
    let o = acstk(&["approx", "--samples", path.to_str().unwrap(), "--degree", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn approx_writes_a_loadable_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.json");
    let samples = fixture("corner_samples.json");
    let o = acstk(&["approx", "--samples", samples.to_str().unwrap(), "--degree", "12", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = acstk(&["validate", "--curve", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
}

#[test]
fn patch_rank_spellings_agree() {
    let p = fixture("patch4.json");
    let a = acstk(&["--json", "patch-rank", "--patch", p.to_str().unwrap(), "--per-axis", "3"]);
    let b = acstk(&["--json", "patch", "rank", "--patch", p.to_str().unwrap(), "--per-axis", "3"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let (va, vb): (Value, Value) =
        (serde_json::from_slice(&a.stdout).unwrap(), serde_json::from_slice(&b.stdout).unwrap());
    assert_eq!(va["result"], vb["result"]);
    assert_eq!(va["result"]["k_min"], 1);
}
