use std::path::Path;
use std::process::{Command, Output};

fn covering(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covering")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn generate_select_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let family = dir.path().join("family.json");
    let result = dir.path().join("result.json");
    let o = covering(&["generate", "--seed", "3", "--n", "8", "--range", "64", "--out", path(&family)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&family).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["boxes"].as_array().unwrap().len(), 8);

    let o = covering(&["select", "--family", path(&family), "--out", path(&result)]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    let selected = r["selected"].as_array().unwrap().len();
    let rejected = r["rejected"].as_array().unwrap().len();
    let dropped = r["p1_dropped"].as_array().unwrap().len();
    assert_eq!(selected + rejected + dropped, 8);

    let o = covering(&["verify", "--family", path(&family), "--result", path(&result)]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let passed = report["passed"].as_bool().unwrap();
    assert_eq!(o.status.code(), Some(if passed { 0 } else { 1 }));
    assert_eq!(report["verification"]["tallies"].as_array().unwrap().len(), 11);
}

#[test]
fn verify_rejects_a_tampered_result() {
    let dir = tempfile::tempdir().unwrap();
    let family = dir.path().join("family.json");
    let result = dir.path().join("result.json");
    assert!(covering(&["generate", "--n", "12", "--out", path(&family)]).status.success());
    assert!(covering(&["select", "--family", path(&family), "--out", path(&result)]).status.success());
    let mut r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    r["trace"][0]["avg"] = serde_json::json!(2.5);
    std::fs::write(&result, r.to_string()).unwrap();
    let o = covering(&["verify", "--family", path(&family), "--result", path(&result)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn maximal_on_a_slab_indicator() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("field.json");
    std::fs::write(&field, r#"{"xs":[0,1,2,3,4],"ys":[0,1],"zs":[0,1],"values":[1,0,0,0]}"#).unwrap();
    let o = covering(&["maximal", "--field", path(&field), "--axis", "1", "--lambda", "0.3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["axis"], 1);
    assert_eq!(v["level_set_measure"], 3);
    let values: Vec<f64> = serde_json::from_value(v["values"].clone()).unwrap();
    assert_eq!(values, [1.0, 0.5, 1.0 / 3.0, 0.25]);
    assert_eq!(v["weak_type"]["passed"], true);
}

#[test]
fn maximal_of_an_exponential_field() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("field.json");
    std::fs::write(&field, r#"{"xs":[0,1,3],"ys":[0,1],"zs":[0,1],"depth":[1,0],"c":1.0}"#).unwrap();
    let o = covering(&["maximal", "--field", path(&field), "--axis", "1", "--lambda", "0.7320508"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let values: Vec<f64> = serde_json::from_value(v["values"].clone()).unwrap();
    let e = std::f64::consts::E;
    assert_eq!(values[0], e);
    assert!((values[1] - e / 3.0).abs() < 1e-15);
    assert_eq!(v["level_set_measure"], 3);
}

#[test]
fn fixture_section_shows_all_class_patterns() {
    let o = covering(&["section", "--fixture"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x_lo,x_hi,y_lo,y_hi,r,s"));
    let labels: std::collections::BTreeSet<String> = lines
        .map(|l| l.rsplitn(3, ',').take(2).collect::<Vec<_>>().join(","))
        .collect();
    for pattern in ["0,1", "1,0", "1,1"] {
        assert!(labels.contains(pattern), "missing s,r = {pattern}");
    }
}

#[test]
fn depth_section_of_a_family() {
    let dir = tempfile::tempdir().unwrap();
    let family = dir.path().join("family.json");
    std::fs::write(
        &family,
        r#"{"boxes":[{"x":[0,2],"y":[0,2],"z":[0,2]},{"x":[1,3],"y":[1,3],"z":[0,2]}]}"#,
    )
    .unwrap();
    let o = covering(&["section", "--family", path(&family), "--z", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    assert!(csv.starts_with("x_lo,x_hi,y_lo,y_hi,depth\n"));
    assert!(csv.contains("\n1,2,1,2,2\n"));
    assert!(csv.contains("\n0,1,2,3,0\n"));
}

#[test]
fn experiment_writes_a_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 9, "n_boxes": 1, "trial_count": 2}"#).unwrap();
    let out = dir.path().join("bundle");
    let o = covering(&["experiment", "--config", path(&cfg), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["seed"], 9);
    assert_eq!(summary["summary"]["trials"], 2);
    assert!(out.join("families/trial_001.json").exists());
    assert!(out.join("histograms/trial_000.csv").exists());
    assert_eq!(std::fs::read_to_string(out.join("trials.csv")).unwrap().lines().count(), 3);
}

#[test]
fn experiment_flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bundle");
    let o = covering(&["experiment", "--seed", "5", "--n", "30", "--trials", "1", "--out", path(&out)]);
    assert!(matches!(o.status.code(), Some(0 | 1)));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["n_boxes"], 30);
    assert_eq!(summary["config"]["trial_count"], 1);
}

#[test]
fn usage_and_io_errors_exit_with_two() {
    assert_eq!(covering(&["select", "--family", "/nonexistent/family.json"]).status.code(), Some(2));
    assert_eq!(covering(&["maximal", "--field", "x.json", "--axis", "4", "--lambda", "1"]).status.code(), Some(2));
    assert_eq!(covering(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"boxes":[{"x":[2,1],"y":[0,1],"z":[0,1]}]}"#).unwrap();
    let o = covering(&["select", "--family", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}
