//! End-to-end runs of the `scenex` binary.

use std::path::Path;
use std::process::{Command, Output};

use scenex::synth::fixture;
use tempfile::TempDir;

fn scenex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scenex")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &Path, spec: &str, seed: u64) -> std::path::PathBuf {
    let log = dir.join(format!("{spec}.jsonl"));
    let o = scenex(&["synth", spec, "--seed", &seed.to_string(), "--out", p(&log)]);
    assert!(o.status.success(), "{}", stderr(&o));
    log
}

fn report(out: &Path, stem: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(out.join(format!("{stem}_report.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn cut_in_drive_end_to_end() {
    let dir = TempDir::new().unwrap();
    let log = synth(dir.path(), "two_lane_cut_in", 5);
    assert!(dir.path().join("two_lane_cut_in.truth.json").is_file());
    let out = dir.path().join("out");
    let o = scenex(&["extract", p(&log), "--out", p(&out), "--debug-dump"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let r = report(&out, "two_lane_cut_in");
    assert_eq!(r["counts"]["cut_in"], 1);
    assert_eq!(r["counts"]["cut_out"], 0);
    assert_eq!(r["opendrive"], "two_lane_cut_in.xodr");
    let xodr = out.join("two_lane_cut_in.xodr");
    let xosc = out.join("two_lane_cut_in_scenario1.xosc");
    assert!(xodr.is_file() && xosc.is_file());

    let o = scenex(&["validate", p(&xodr), p(&xosc)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout).matches("ok (0 diagnostics)").count(), 2);

    let cmp = dir.path().join("cmp");
    let o = scenex(&["compare", p(&log), p(&xosc), p(&xodr), "--out", p(&cmp)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for suffix in ["_compare.csv", "_ego_compare.csv", "_compare.json"] {
        assert!(cmp.join(format!("two_lane_cut_in_scenario1{suffix}")).is_file(), "{suffix}");
    }
}

#[test]
fn drive_without_manoeuvres_yields_road_only() {
    let dir = TempDir::new().unwrap();
    let log = synth(dir.path(), "keep_lane", 2);
    let out = dir.path().join("out");
    let o = scenex(&["extract", p(&log), "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = report(&out, "keep_lane");
    assert_eq!(r["counts"]["cut_in"], 0);
    assert_eq!(r["counts"]["cut_out"], 0);
    assert!(out.join("keep_lane.xodr").is_file());
    let scenarios = std::fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "xosc"));
    assert_eq!(scenarios.count(), 0);
}

#[test]
fn missing_config_fails_at_config_stage() {
    let dir = TempDir::new().unwrap();
    let log = synth(dir.path(), "keep_lane", 2);
    let missing = dir.path().join("nope.toml");
    let o = scenex(&["--config", p(&missing), "extract", p(&log), "--out", p(dir.path())]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("[config]"), "{}", stderr(&o));

    let o = scenex(&["--set", "samples=1", "extract", p(&log), "--out", p(dir.path())]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("samples"), "{}", stderr(&o));
}

#[test]
fn synth_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let a = std::fs::read(synth(&dir.path().join("a"), "two_lane_cut_in", 9)).unwrap();
    let b = std::fs::read(synth(&dir.path().join("b"), "two_lane_cut_in", 9)).unwrap();
    let c = std::fs::read(synth(&dir.path().join("c"), "two_lane_cut_in", 10)).unwrap();
    assert!(a == b, "same seed, different bytes");
    assert!(a != c, "seed has no effect");
}

#[test]
fn synth_rejects_missing_lane() {
    let dir = TempDir::new().unwrap();
    let mut spec = fixture("two_lane_cut_in").unwrap();
    spec.actors[0].lane = -5;
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, toml::to_string(&spec).unwrap()).unwrap();
    let o = scenex(&["synth", p(&path), "--out", p(&dir.path().join("bad.jsonl"))]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("lane -5"), "{}", stderr(&o));
    assert!(!dir.path().join("bad.jsonl").exists());
}

#[test]
fn compare_against_the_wrong_drive_fails() {
    let dir = TempDir::new().unwrap();
    let log = synth(dir.path(), "two_lane_cut_in", 5);
    // same track id, but it only shows up after the scenario window
    let mut spec = fixture("keep_lane").unwrap();
    spec.duration = 40.0;
    spec.actors[0].appear = 25.0;
    let spec_path = dir.path().join("late.toml");
    std::fs::write(&spec_path, toml::to_string(&spec).unwrap()).unwrap();
    let other = dir.path().join("late.jsonl");
    assert!(scenex(&["synth", p(&spec_path), "--out", p(&other)]).status.success());
    let out = dir.path().join("out");
    assert!(scenex(&["extract", p(&log), "--out", p(&out)]).status.success());
    let o = scenex(&[
        "compare",
        p(&other),
        p(&out.join("two_lane_cut_in_scenario1.xosc")),
        p(&out.join("two_lane_cut_in.xodr")),
        "--out",
        p(&dir.path().join("cmp")),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("overlap"), "{}", stderr(&o));
}

#[test]
fn validate_rejects_edited_file() {
    let dir = TempDir::new().unwrap();
    let log = synth(dir.path(), "straight_road", 1);
    let out = dir.path().join("out");
    assert!(scenex(&["extract", p(&log), "--out", p(&out)]).status.success());
    let xodr = out.join("straight_road.xodr");
    let text = std::fs::read_to_string(&xodr).unwrap();
    std::fs::write(&xodr, text.replacen("  <road", "<road", 1)).unwrap();
    let o = scenex(&["validate", p(&xodr)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("canonical"), "{}", stderr(&o));
}
