//! End-to-end runs of the binary: fixture loading, verdicts, exit codes,
//! and output formats.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coarse-dyn")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

fn fixture() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/rotation.scn")
}

#[test]
fn fixture_scenario_passes_every_command() {
    for cmd in
        ["check-space", "check-map", "check-group", "check-cds", "conjugacy", "orbit", "coproduct", "hyperlift"]
    {
        let out = run(&[cmd, "--scenario", fixture()]);
        let text = stdout(&out);
        assert!(out.status.success(), "{cmd} exited nonzero:\n{text}");
        assert!(text.contains(", 0 failed"), "{cmd} reported failures:\n{text}");
    }
}

#[test]
fn asdim_resolves_spaces_windows_and_groups() {
    for (target, n) in [("octagon", "1"), ("line", "1"), ("z4", "0")] {
        let out = run(&["asdim", "--scenario", fixture(), "--space", target, "--n", n]);
        let text = stdout(&out);
        assert!(out.status.success(), "asdim {target}:\n{text}");
        assert!(text.contains(&format!("PASS asdim [{target}]")), "{text}");
        assert!(text.contains("bounded at"), "{text}");
    }
}

#[test]
fn asdim_rejects_unknown_names() {
    let out = run(&["asdim", "--scenario", fixture(), "--space", "nowhere"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("unknown space, window, or group"));
}

#[test]
fn zr_demo_passes_on_a_small_window() {
    let out = run(&["zr-demo", "--half-width", "12", "--step", "0.5"]);
    let text = stdout(&out);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("4 checks, 0 failed"), "{text}");
}

#[test]
fn corpus_is_deterministic_across_runs() {
    let a = run(&["corpus", "--count", "8", "--seed", "5", "--format", "json"]);
    let b = run(&["corpus", "--count", "8", "--seed", "5", "--format", "json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same seed and flags must give identical bytes");
    let parsed: serde_json::Value = serde_json::from_slice(&a.stdout).expect("valid json");
    assert_eq!(parsed["seed"], 5);
    assert!(parsed["checks"].as_array().map(|c| !c.is_empty()).unwrap_or(false));
}

#[test]
fn corpus_varies_with_the_seed() {
    let a = run(&["corpus", "--count", "8", "--seed", "5"]);
    let b = run(&["corpus", "--count", "8", "--seed", "6"]);
    assert_ne!(a.stdout, b.stdout, "different seeds should generate different instances");
}

#[test]
fn report_flag_writes_the_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("out.json");
    let out = run(&[
        "check-space",
        "--scenario",
        fixture(),
        "--format",
        "json",
        "--report",
        path.to_str().expect("utf8 path"),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "report goes to the file, not stdout");
    let text = std::fs::read_to_string(&path).expect("report written");
    let parsed: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    assert_eq!(parsed["checks"][0]["verdict"], "PASS");
}

#[test]
fn dangling_reference_is_a_load_error() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("broken.scn");
    std::fs::write(
        &path,
        r#"{
            "groups": { "z1": { "elements": ["e"], "table": [[0]] } },
            "systems": { "s": { "space": "missing", "group": "z1", "evolution": { "e": [] } } }
        }"#,
    )
    .expect("fixture written");
    let out = run(&["check-cds", "--scenario", path.to_str().expect("utf8 path")]);
    assert_eq!(out.status.code(), Some(2), "load errors use exit code 2");
    let err = String::from_utf8(out.stderr).expect("utf8 stderr");
    assert!(err.contains("unknown space"), "{err}");
}

#[test]
fn invalid_chain_loads_but_fails_check_space() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("lopsided.scn");
    // (a, b) without (b, a): the chain loads leniently and the check reports
    // the symmetry violation as a verdict
    std::fs::write(
        &path,
        r#"{
            "spaces": {
                "lopsided": {
                    "points": ["a", "b"],
                    "chain": [[["a", "a"], ["b", "b"], ["a", "b"]]]
                }
            }
        }"#,
    )
    .expect("fixture written");
    let out = run(&["check-space", "--scenario", path.to_str().expect("utf8 path")]);
    assert_eq!(out.status.code(), Some(1), "validation failures use exit code 1");
    let text = stdout(&out);
    assert!(text.contains("FAIL check-space [lopsided]"), "{text}");
    assert!(text.contains("inverse"), "witness should name the asymmetric pair: {text}");
}

#[test]
fn missing_scenario_flag_is_a_usage_error() {
    let out = run(&["check-space"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).expect("utf8").contains("--scenario"));
}
