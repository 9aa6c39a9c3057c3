use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn finsheaf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsheaf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Writes a workspace document to a fresh temporary file.
fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("finsheaf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn fixtures_validate_and_round_trip() {
    for f in ["pseudocircle.json", "wedge.json", "arrow.json", "dual_numbers.json", "empty.json"] {
        let o = finsheaf(&["check", fixture(f).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stderr(&o));
        assert!(stdout(&o).starts_with("ok:"));
    }
}

#[test]
fn non_functorial_restrictions_name_the_triple() {
    let o = finsheaf(&["check", fixture("not_functorial.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("spaces.chain"), "{e}");
    assert!(e.contains("triple (p, q, l)"), "{e}");
}

#[test]
fn pseudocircle_cohomology_and_classification() {
    let o = finsheaf(&["run", fixture("pseudocircle.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("H^0 = [2]\n  H^1 = [2]"), "{out}");
    assert!(out.contains("semi_separated = false"));
    assert!(out.contains("schematic = false"));
}

#[test]
fn arrow_is_not_a_finite_space() {
    let o = finsheaf(&["run", fixture("arrow.json").to_str().unwrap()]);
    let out = stdout(&o);
    assert!(out.contains("finite_space = false"));
    assert!(out.contains("O_p -> O_q is not flat"));
}

#[test]
fn wedge_tasks_pass() {
    let o = finsheaf(&["run", fixture("wedge.json").to_str().unwrap()]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.contains("[7] duality-check to_pt: PASS"));
    assert!(out.contains("i = 0: Hom(Rf_* M, N[i]) = [2], Hom(M, f^! N[i]) = [2]"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn json_reports_keep_declaration_order() {
    let o = finsheaf(&["run", fixture("wedge.json").to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    let idx: Vec<u64> = v["tasks"].as_array().unwrap().iter().map(|t| t["index"].as_u64().unwrap()).collect();
    assert_eq!(idx, (0..12).collect::<Vec<_>>());
    assert_eq!(v["tasks"][1]["data"]["cohomology"]["0"], serde_json::json!([2, 2]));
}

#[test]
fn reports_are_byte_identical() {
    let path = fixture("wedge.json");
    let a = finsheaf(&["run", path.to_str().unwrap(), "--seed", "9"]);
    let b = finsheaf(&["run", path.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn task_filter() {
    let o = finsheaf(&["run", fixture("wedge.json").to_str().unwrap(), "--task", "classify"]);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with('[')).count(), 1);
    let o = finsheaf(&["run", fixture("wedge.json").to_str().unwrap(), "--task", "no-such-task"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ring_size_cap() {
    let o = finsheaf(&["--max-ring-size", "3", "check", fixture("arrow.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rings.Z4"));
}

#[test]
fn coherator_on_the_pseudocircle_fails_with_a_reason() {
    let p = scratch(
        "pc_coherator.json",
        r#"{ "spaces": { "pc": { "fixture": "pseudocircle" } },
             "sheaves": { "O": { "structure": "pc" } },
             "tasks": [{ "task": "dqc-coherator", "object": "O" }] }"#,
    );
    let o = finsheaf(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("space is not schematic"));
}

#[test]
fn input_errors_carry_the_record_path() {
    let p = scratch(
        "dangling.json",
        r#"{ "spaces": { "w": { "fixture": "wedge" } },
             "sheaves": { "M": { "explicit": { "space": "w", "stalks": { "z": { "free": 1 } } } } } }"#,
    );
    let o = finsheaf(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sheaves.M.stalks.z"), "{}", stderr(&o));

    let p = scratch("unknown_task.json", r#"{ "tasks": [{ "task": "frobnicate" }] }"#);
    assert_eq!(finsheaf(&["run", p.to_str().unwrap()]).status.code(), Some(2));

    let p = scratch("syntax.json", "{ \"spaces\": ");
    assert_eq!(finsheaf(&["check", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn empty_workspace_runs_nothing() {
    let o = finsheaf(&["run", fixture("empty.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn octahedron_model_is_a_sphere() {
    let o = finsheaf(&["model", "--complex", fixture("octahedron.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("26 points, dimension 2"));
    assert!(out.contains("H^1 = [] (constant F_2)"));
    assert!(out.contains("H^2 = [2] (constant F_2)"));
}

#[test]
fn flat_resolution_over_dual_numbers_is_truncated() {
    let o = finsheaf(&["run", fixture("dual_numbers.json").to_str().unwrap(), "--task", "flat-res"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("truncated after 2 covers"));
}
