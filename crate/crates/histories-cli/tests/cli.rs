use std::io::Write;
use std::process::Command;

fn qhist(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qhist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qhist(args);
    assert!(
        out.status.success(),
        "qhist {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write_scenario(json: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(json.as_bytes()).unwrap();
    f
}

const IDENTITY2: &str = "[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]";
const Z_DEF: &str = r#"{
  "name": "Z",
  "eigenvalues": [1.0, -1.0],
  "eigenvectors": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
}"#;

#[test]
fn demo_xz_example_lists_the_two_histories() {
    let out = stdout(&["demo", "xz-example"]);
    assert!(out.contains("(0,0)"), "{out}");
    assert!(out.contains("(1,1)"), "{out}");
    assert_eq!(out.matches("0.7071068").count(), 2, "{out}");
    assert!(!out.contains("(0,1)"));
}

#[test]
fn demo_bell2_chsh_recovers_the_violation() {
    let out = stdout(&["demo", "bell2-chsh"]);
    assert!(out.contains("per-pair"), "{out}");
    assert!(out.contains("2.828427"), "{out}");
    assert!(out.contains("violated         true"), "{out}");
    assert!(out.contains("0.8535534"), "{out}");
}

#[test]
fn demo_precession_lg_violates() {
    let out = stdout(&["demo", "precession-lg"]);
    assert!(out.contains("1.500000"), "{out}");
    assert!(out.contains("violated                true"), "{out}");
}

#[test]
fn json_format_has_full_precision() {
    let out = stdout(&["--format", "json", "demo", "xz-example"]);
    assert!(out.contains("0.7071067811865476"), "{out}");
    let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(parsed["command"], "vector");
}

#[test]
fn csv_format_has_declared_columns() {
    let out = stdout(&["--format", "csv", "demo", "xz-example"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "slot_1,slot_2,probability,amplitude_re,amplitude_im"
    );
    assert!(out.contains("0,0,"), "{out}");
}

#[test]
fn output_is_deterministic() {
    for format in ["table", "json", "csv"] {
        let a = qhist(&["--format", format, "demo", "bell2-chsh"]);
        let b = qhist(&["--format", format, "demo", "bell2-chsh"]);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn sampling_is_seeded_and_reproducible() {
    let a = stdout(&["--seed", "9", "demo", "xz-example", "--sample", "50"]);
    let b = stdout(&["--seed", "9", "demo", "xz-example", "--sample", "50"]);
    assert_eq!(a, b);
    assert!(a.contains("sampled 50 sequences (seed 9)"), "{a}");
}

#[test]
fn non_unitary_evolution_is_named_and_exits_2() {
    let bad = format!(
        r#"{{
  "dimension": 2,
  "initial_state": [[1.0, 0.0], [0.0, 0.0]],
  "evolutions": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [2.0, 0.0]]]],
  "measurements": [{Z_DEF}]
}}"#
    );
    let f = write_scenario(&bad);
    let out = qhist(&["vector", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("evolutions[0]"), "{err}");
}

#[test]
fn length_mismatch_exits_2() {
    let bad = format!(
        r#"{{
  "dimension": 2,
  "initial_state": [[1.0, 0.0], [0.0, 0.0]],
  "evolutions": [{IDENTITY2}, {IDENTITY2}, {IDENTITY2}],
  "measurements": [{Z_DEF}, {Z_DEF}]
}}"#
    );
    let f = write_scenario(&bad);
    let out = qhist(&["probs", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_demo_exits_2() {
    let out = qhist(&["demo", "no-such-demo"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn entropy_without_reduction_choice_exits_2() {
    let f = write_scenario(&format!(
        r#"{{
  "dimension": 2,
  "initial_state": [[1.0, 0.0], [0.0, 0.0]],
  "evolutions": [{IDENTITY2}],
  "measurements": [{Z_DEF}]
}}"#
    ));
    let out = qhist(&["entropy", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn entropy_of_composite_subsystem() {
    // Bell pair measured locally at one slot: S(rho^A) = ln 2.
    let scenario = r#"{
  "dimension": 4,
  "initial_state": [[0.7071067811865476, 0.0], [0.0, 0.0], [0.0, 0.0], [0.7071067811865476, 0.0]],
  "evolutions": [[
    [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
    [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
    [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
    [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
  ]],
  "measurements": [{
    "name": "ZZ",
    "eigenvalues": [1.0, 2.0, 3.0, 4.0],
    "eigenvectors": [
      [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
      [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
      [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
      [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
    ]
  }],
  "composite": {
    "dim_a": 2,
    "dim_b": 2,
    "measurements_a": [{
      "name": "Z",
      "eigenvalues": [1.0, -1.0],
      "eigenvectors": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
    }],
    "measurements_b": [{
      "name": "Z",
      "eigenvalues": [1.0, -1.0],
      "eigenvectors": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
    }]
  }
}"#;
    let f = write_scenario(scenario);
    let out = stdout(&["entropy", "--subsystem", "a", f.path().to_str().unwrap()]);
    assert!(out.contains("0.6931472"), "{out}");
    assert!(out.contains("entropy_bits  1.0000000"), "{out}");
}

#[test]
fn chsh_mode_flag_overrides_scenario_mode() {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/scenarios/bell2-chsh.json"
    );
    let out = stdout(&["chsh", "--mode", "fixed-basis", path]);
    assert!(out.contains("fixed-basis"), "{out}");
    assert!(out.contains("S                2.828427"), "{out}");
}

#[test]
fn intermediate_postselection() {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/scenarios/bell2-chsh.json"
    );
    let out = stdout(&["intermediate", "--beta2", "0", path]);
    assert!(out.contains("normalization  0.5000000"), "{out}");
}
