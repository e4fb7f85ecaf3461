use std::path::Path;
use std::process::{Command, Output};

use combing::cli::{read_obj_polylines, CurveFile};

fn combing(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combing")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn distance_of_hopf_pair() {
    let o = combing(&["distance", "--x", "hopf+", "--y", "hopf-"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("D(hopf+,hopf-) = 1"), "{}", stdout(&o));
    assert!(stdout(&o).contains("homotopic: no"));
}

#[test]
fn identical_fields_need_perturbation() {
    let o = combing(&["distance", "--x", "hopf+", "--y", "hopf+"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--perturb"), "{}", stderr(&o));
    let o = combing(&["distance", "--x", "hopf+", "--y", "hopf+", "--perturb", "1e-3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("= 0"), "{}", stdout(&o));
    assert!(stdout(&o).contains("homotopic: yes"));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["distance", "--x", "hopf+"][..],
        &["distance", "--x", "seifert:2,4", "--y", "hopf+"],
        &["distance", "--x", "hopf+", "--y", "hopf-", "--resolution", "1"],
        &["frobnicate"],
    ] {
        let o = combing(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("report.json");
    std::fs::write(&cfg, r#"{"x": "hopf+", "y": "hopf+", "params": {"resolution": 40}}"#).unwrap();
    let o = combing(&["distance", "--config", path(&cfg), "--y", "hopf-", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["D"], 1);

    std::fs::write(&cfg, r#"{"x": "hopf+", "colour": "red"}"#).unwrap();
    let o = combing(&["distance", "--config", path(&cfg), "--y", "hopf-"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
}

#[test]
fn json_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let docs: Vec<String> = (0..2)
        .map(|k| {
            let out = dir.path().join(format!("r{k}.json"));
            let o = combing(&["invariant", "--x", "xn:2", "--out", path(&out)]);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            assert!(stdout(&o).contains("I(xn:2) = 1"), "{}", stdout(&o));
            std::fs::read_to_string(&out).unwrap()
        })
        .collect();
    assert_eq!(docs[0], docs[1]);
}

#[test]
fn extract_writes_curves_and_obj() {
    let dir = tempfile::tempdir().unwrap();
    let (out, obj) = (dir.path().join("c.json"), dir.path().join("c.obj"));
    let o = combing(&["extract", "--x", "hopf+", "--y", "hopf-", "--out", path(&out), "--obj", path(&obj)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file: CurveFile = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file.loops.len(), 2);
    let lines = read_obj_polylines(&std::fs::read_to_string(&obj).unwrap()).unwrap();
    assert_eq!(lines.len(), file.loops.len());
    for (poly, l) in lines.iter().zip(&file.loops) {
        assert_eq!(poly.len(), l.points.len());
        assert!(poly.iter().flatten().all(|c| c.is_finite()));
    }
}

#[test]
fn quick_verify_suite_passes() {
    let o = combing(&["verify", "quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.contains("[PASS]")).count(), 4, "{text}");
}
