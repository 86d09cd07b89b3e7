use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn symhom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symhom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn homology_of_hollow_triangle() {
    let input = fixture("hollow_triangle.json");
    let out = symhom(&[
        "homology",
        "--input",
        &input,
        "--max-dim",
        "2",
        "--reduce",
        "deg+sym",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tool"], "symhom");
    assert_eq!(v["command"], "homology");
    let rows = v["degrees"].as_array().unwrap();
    let betti: Vec<u64> = rows.iter().map(|r| r["betti"].as_u64().unwrap()).collect();
    let reduced: Vec<u64> = rows
        .iter()
        .map(|r| r["dim_reduced"].as_u64().unwrap())
        .collect();
    assert_eq!(betti, [0, 0, 1, 0]);
    assert_eq!(reduced[..3], [1, 3, 3]);
}

#[test]
fn output_is_deterministic() {
    let input = fixture("c5.json");
    let args = [
        "homology",
        "--input",
        &input,
        "--max-dim",
        "2",
        "--reduce",
        "rt",
    ];
    let a = symhom(&args);
    let b = symhom(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn integer_homology_reports_torsion() {
    let out = symhom(&["counterexample", "--which", "r"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["ranks"], serde_json::json!([0, 1, 3, 21, 165]));
    let h3 = v["homology"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["n"] == 3)
        .unwrap();
    assert_eq!(h3["computed"], "Z/2");
}

#[test]
fn table_format() {
    let input = fixture("tetrahedron_boundary.json");
    let out = symhom(&[
        "homology",
        "--input",
        &input,
        "--max-dim",
        "2",
        "--format",
        "table",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l.trim_start().starts_with("n ") && l.contains("betti")));
    assert!(text.contains("tool: symhom"));
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("symhom_cli_{}.json", std::process::id()));
    let input = fixture("point.json");
    let out = symhom(&[
        "homology",
        "--input",
        &input,
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let _ = std::fs::remove_file(&path);
    assert_eq!(v["command"], "homology");
}

#[test]
fn usage_errors_exit_2() {
    let hollow = fixture("hollow_triangle.json");
    let k2 = fixture("k2.json");
    for args in [
        vec![
            "homology",
            "--input",
            hollow.as_str(),
            "--ring",
            "z",
            "--reduce",
            "sym",
        ],
        vec!["homology", "--input", k2.as_str(), "--reduce", "sym"],
        vec!["homology", "--input", "/nonexistent/input.json"],
        vec!["homology", "--ring", "p"],
        vec!["frobnicate"],
    ] {
        let out = symhom(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn resource_cap_exits_3() {
    let input = fixture("c5.json");
    let out = symhom(&[
        "homology",
        "--input",
        &input,
        "--max-dim",
        "3",
        "--cap-cells",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_suites_pass() {
    let k2 = fixture("k2.json");
    let hollow = fixture("hollow_triangle.json");
    for args in [
        vec!["verify", "--suite", "identities", "--max-dim", "4"],
        vec![
            "verify",
            "--suite",
            "homotopy",
            "--input",
            hollow.as_str(),
            "--max-dim",
            "3",
        ],
        vec![
            "verify",
            "--suite",
            "functor",
            "--input",
            k2.as_str(),
            "--max-dim",
            "3",
        ],
        vec![
            "verify",
            "--suite",
            "splitting",
            "--input",
            k2.as_str(),
            "--max-dim",
            "3",
        ],
    ] {
        let out = symhom(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn help_exits_0() {
    let out = symhom(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("homology"));
}
