use std::path::PathBuf;
use std::process::{Command, Output};

use koszul_core::cli::Envelope;

fn koszul(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koszul")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("koszul-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn envelope(out: &Output) -> Envelope {
    serde_json::from_slice(&out.stdout).expect("stdout is an envelope")
}

#[test]
fn passing_runs_exit_zero() {
    for args in [
        &["validate", "--algebra", "sl2", "--module", "exterior", "--max-degree", "4"][..],
        &["weil-check", "--algebra", "abelian:2", "--max-degree", "5"],
        &["transgress", "--algebra", "su2"],
        &["duality", "--algebra", "su2", "--module", "exterior", "--max-degree", "6"],
        &["cohomology", "--algebra", "su2", "--module", "exterior", "--model", "cartan", "--max-degree", "5"],
    ] {
        let out = koszul(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let env = envelope(&out);
        assert!(env.pass);
        assert_eq!(env.tool, "koszul");
    }
}

#[test]
fn corrupted_duality_exits_one() {
    let out = koszul(&["duality", "--algebra", "su2", "--module", "exterior", "--max-degree", "6", "--corrupt-transgression"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!envelope(&out).pass);
}

#[test]
fn non_reductive_algebra_is_a_math_failure() {
    // the two-dimensional solvable algebra [x, y] = y
    let path = scratch(
        "solvable.json",
        r#"{"name": "aff1", "dim": 2, "basis": ["x", "y"],
            "brackets": [{"i": 0, "j": 1, "terms": [{"k": 1, "c": "1"}]}]}"#,
    );
    let out = koszul(&["validate", "--algebra", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.to_lowercase().contains("reductive"), "{err}");
}

#[test]
fn malformed_json_reports_location() {
    let path = scratch("broken.json", "{\n  \"name\": \"x\",\n  \"dim\": 2,\n  \"basis\": [\"a\" \"b\"]\n}\n");
    let out = koszul(&["validate", "--algebra", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn input_errors_exit_two() {
    for args in [
        &["validate", "--algebra", "so5"][..],
        &["validate", "--module", "forms:diagonal:1"],
        &["duality", "--max-degree", "0"],
    ] {
        let out = koszul(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn text_format_carries_verdict() {
    let out = koszul(&["weil-check", "--algebra", "su2", "--max-degree", "4", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"), "{text}");
}

#[test]
fn json_round_trips_and_thread_count_is_invisible() {
    let args = ["duality", "--algebra", "abelian:2", "--module", "exterior", "--max-degree", "6"];
    let one = Command::new(env!("CARGO_BIN_EXE_koszul")).args(args).env("KOSZUL_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_koszul")).args(args).env("KOSZUL_THREADS", "4").output().unwrap();
    assert_eq!(one.stdout, many.stdout);
    let env = envelope(&one);
    let again = env.to_json();
    assert_eq!(again.trim_end(), String::from_utf8(one.stdout).unwrap().trim_end());
}
