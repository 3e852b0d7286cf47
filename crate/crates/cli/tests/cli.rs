//! End-to-end tests of the command-line interface.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skein-tori"))
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("skein-tori-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn analyze_json_report() {
    let out = bin()
        .args(["analyze", "--builtin", "polygon:3", "--n", "2", "--order", "4"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pass"], true);
    assert_eq!(v["center"]["rank_kernel"], v["center"]["rank_skew"]);
    assert_eq!(v["center"]["center_equal"], true);
    assert!(v["blocks"]["checks"].as_array().unwrap().len() > 5);
}

#[test]
fn analyze_reduced_flags_even_n() {
    // n even: the explicit reduced center is not asserted; kernel side only.
    let out = bin()
        .args(["analyze", "--builtin", "genus:1,1", "--n", "2", "--order", "4", "--reduced"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["center"]["center_explicit_available"], false);
    assert!(v["center"]["rank_kernel"].as_str().unwrap().len() >= 1);
}

#[test]
fn analyze_bad_spec_exits_2() {
    let path = tmp_path("bad.json");
    std::fs::write(
        &path,
        r#"{
            "schema": 1,
            "surface": {"genus": 0, "punctures": [3]},
            "faces": [
                {"edges": ["a","b","c"], "flips": [false,false,false]},
                {"edges": ["a","d","e"], "flips": [true,false,false]},
                {"edges": ["a","f","g"], "flips": [true,false,false]}
            ]
        }"#,
    )
    .unwrap();
    let out = bin()
        .args(["analyze", "--spec", path.to_str().unwrap(), "--n", "2", "--order", "4"])
        .output()
        .unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("3 face slots"), "stderr: {err}");
}

#[test]
fn spec_file_roundtrip_analyze() {
    // a valid square fan spec
    let path = tmp_path("square.json");
    std::fs::write(
        &path,
        r#"{
            "schema": 1,
            "surface": {"genus": 0, "punctures": [4]},
            "faces": [
                {"edges": ["d","e1","e2"], "flips": [false,false,false]},
                {"edges": ["d","e3","e4"], "flips": [true,false,false]}
            ]
        }"#,
    )
    .unwrap();
    let out = bin()
        .args(["analyze", "--spec", path.to_str().unwrap(), "--n", "2", "--order", "6"])
        .output()
        .unwrap();
    std::fs::remove_file(&path).ok();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["surface"]["punctures"][0], 4);
}

#[test]
fn batch_csv_and_determinism() {
    let run = || {
        bin()
            .args([
                "batch",
                "--builtin",
                "polygon:4",
                "--n",
                "2",
                "--order",
                "2..6",
                "--format",
                "csv",
            ])
            .env("SKEIN_TORI_THREADS", "2")
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "batch output must be byte-stable");
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 5, "header + 5 rows");
    assert!(lines[0].starts_with("surface,n,order"));
    for row in &lines[1..] {
        assert!(row.contains("polygon:4"));
        assert!(row.contains("true"));
    }
}

#[test]
fn batch_grid_row_count() {
    // polygon sizes x n x orders: one surface here, 2 n values, 5 orders.
    let out = bin()
        .args(["batch", "--builtin", "polygon:5", "--n", "2,3", "--order", "2,4,6,8,12"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
}

#[test]
fn skewnf_roundtrip() {
    let path = tmp_path("skew.txt");
    std::fs::write(&path, "# test matrix\n0 2 -1 0\n-2 0 3 1\n1 -3 0 -2\n0 -1 2 0\n").unwrap();
    let out = bin().args(["skewnf", "--input", path.to_str().unwrap()]).output().unwrap();
    std::fs::remove_file(&path).ok();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verified"], true);
    let det = v["transform_det"].as_str().unwrap();
    assert!(det == "1" || det == "-1");
}

#[test]
fn emit_matrices_format() {
    let out = bin()
        .args(["emit-matrices", "--builtin", "polygon:3", "--n", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# matrix qbar_ext rows=9 cols=9"));
    assert!(text.contains("# rows: "));
    // all matrix lines are decimal integers
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        for tok in line.split_whitespace() {
            tok.parse::<i64>().unwrap();
        }
    }
}

#[test]
fn verify_quick_passes() {
    let out = bin().args(["verify", "--quick"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.trim_end().ends_with("all cases pass"));
}
