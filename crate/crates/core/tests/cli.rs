use std::process::{Command, Output};

fn fwl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fwl"))
        .args(args)
        .env("FWL_DETERMINISTIC", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_shows_every_scenario_with_its_claim() {
    let o = fwl(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().count() >= 30);
    assert!(text
        .lines()
        .all(|l| l.split('\t').nth(1).is_some_and(|v| !v.is_empty())));
    assert!(text.contains("first-variation-grid-2d-square"));
}

#[test]
fn csv_has_fixed_header_and_extrapolated_row() {
    let o = fwl(&[
        "run",
        "--suite",
        "standard",
        "--scenario",
        "first-variation-indicator-norm",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scenario,mode,grid,h,lhs,rhs_bulk,rhs_boundary,rhs_total,abs_err,rel_err,pass,runtime_ms"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    let last: Vec<&str> = rows[5].split(',').collect();
    assert_eq!(last[3], "extrapolated");
    assert_eq!(last[10], "true");
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = [
        "run",
        "--suite",
        "standard",
        "--scenario",
        "first-variation-random",
        "--scenario",
        "dual-cap-q1",
        "--seed",
        "11",
    ];
    let a = fwl(&args);
    let b = fwl(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = fwl(&[&args[..args.len() - 1], &["12"]].concat());
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn json_output_to_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let o = fwl(&[
        "run",
        "--suite",
        "standard",
        "--scenario",
        "conjugate-indicator",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    let keys: Vec<&str> = v[0].as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "scenario",
        "mode",
        "ladder",
        "lhs",
        "rhs_bulk",
        "rhs_boundary",
        "rhs_total",
        "abs_err",
        "rel_err",
        "pass",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
}

#[test]
fn unknown_scenario_exits_2() {
    let o = fwl(&["run", "--suite", "standard", "--scenario", "no-such-thing"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(
        &path,
        r#"{"scenarios": [{"name": "a", "verifies": "x", "check": {"kind": "value",
            "probe": {"probe": "conjugate", "u": {"atom": "indicator", "set": {"shape": "interval", "lo": -1, "hi": 1}}, "at": 2},
            "expected": 2}, "tolerance": 1}]}"#,
    )
    .unwrap();
    let o = fwl(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tolerance"));
}

#[test]
fn too_tight_tolerance_exits_1() {
    let o = fwl(&[
        "run",
        "--suite",
        "standard",
        "--scenario",
        "dual-indicators-q0.5",
        "--tol",
        "1e-14",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn convergence_of_exact_scenario_is_one_row() {
    let o = fwl(&[
        "convergence",
        "--suite",
        "standard",
        "--scenario",
        "first-variation-cap-norm",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].ends_with(",n/a"));
}
