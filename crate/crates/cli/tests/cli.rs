use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_immobilize2d"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env("IMMOBILIZE2D_THREADS", "1").output().expect("run binary")
}

struct Files {
    _dir: TempDir,
    body: PathBuf,
    points: PathBuf,
}

impl Files {
    fn path(&self, name: &str) -> String {
        self.body.parent().unwrap().join(name).to_str().unwrap().to_string()
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture(name: &str) -> Files {
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("body.json");
    let points = dir.path().join("points.json");
    let out = run(&["fixture", name, "--body-out", s(&body), "--points-out", s(&points)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    Files { _dir: dir, body, points }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn classify(f: &Files, mode: &str) -> Output {
    run(&["classify", "--mode", mode, "--body", s(&f.body), "--points", s(&f.points)])
}

#[test]
fn classify_exit_codes() {
    let remark = fixture("remark");
    let o = classify(&remark, "fix");
    assert_eq!(o.status.code(), Some(20));
    let v = json(&o);
    assert_eq!(v["status"], "FIRST_ORDER_INDETERMINATE");
    assert_eq!(v["witness"]["direction"], serde_json::json!(["0", "1"]));

    let corners = fixture("opposite-corners");
    assert_eq!(classify(&corners, "almost").status.code(), Some(0));
    let o = classify(&corners, "fix");
    assert_eq!(o.status.code(), Some(10));
    let v = json(&o);
    assert_eq!(v["status"], "NOT_WEAKLY_FIX");
    assert_eq!(v["witness"]["kind"], "rotation");
    assert_eq!(v["witness"]["center"], serde_json::json!(["0", "0"]));

    assert_eq!(classify(&fixture("straddle"), "fix").status.code(), Some(0));
}

#[test]
fn classify_writes_out_file_and_timings() {
    let f = fixture("midpoints");
    let out = f.path("verdict.json");
    let o = run(&["classify", "--mode", "fix", "--body", s(&f.body), "--points", s(&f.points), "--out", &out, "--timings"]);
    assert_eq!(o.status.code(), Some(20));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["metadata"]["durations_ms"].is_number());
    assert_eq!(v["witness"]["center"], serde_json::json!(["0", "0"]));
}

#[test]
fn precision_overrides() {
    let f = fixture("opposite-corners");
    let args = ["classify", "--mode", "fix", "--body", s(&f.body), "--points", s(&f.points)];
    let mut tol = args.to_vec();
    tol.extend(["--tol", "1/1000000"]);
    let v = json(&run(&tol));
    assert_eq!(v["metadata"]["mode"], "tolerant");
    assert_eq!(v["metadata"]["tolerance"], "1/1000000");
    let mut exact = args.to_vec();
    exact.push("--exact");
    assert_eq!(json(&run(&exact))["metadata"]["mode"], "exact");
    let mut both = exact.clone();
    both.extend(["--tol", "1/10"]);
    assert_eq!(run(&both).status.code(), Some(2));
}

#[test]
fn errors_exit_one() {
    let f = fixture("remark");
    let missing = f.path("missing.json");
    let o = run(&["classify", "--mode", "fix", "--body", &missing, "--points", s(&f.points)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));

    let bad = f.path("bad.json");
    std::fs::write(
        &bad,
        r#"{"mode":"exact","elements":[{"type":"segment","a":["0","0"],"b":["1","0"]},{"type":"segment","a":["1","0"],"b":["0","1"]},{"type":"segment","a":["0","1"],"b":["1","1"]}]}"#,
    )
    .unwrap();
    let o = run(&["classify", "--mode", "fix", "--body", &bad, "--points", s(&f.points)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("element"), "{}", String::from_utf8_lossy(&o.stderr));

    let pts = f.path("pts.json");
    std::fs::write(&pts, r#"[{"coords":["0","1/2"]}]"#).unwrap();
    let o = run(&["classify", "--mode", "fix", "--body", s(&f.body), "--points", &pts]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn refine_codes() {
    let corners = fixture("opposite-corners");
    let o = run(&["refine", "--body", s(&corners.body), "--points", s(&corners.points), "--epsilon", "1/5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["placement"]["delta"], "1/10");
    assert_eq!(v["placement"]["pairs"][0]["side"], "both_sides");
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    assert_eq!(v["verdict"]["status"], "POSITIVE");

    let remark = fixture("remark");
    let o = run(&["refine", "--body", s(&remark.body), "--points", s(&remark.points), "--epsilon", "1/5"]);
    assert_eq!(o.status.code(), Some(11));

    let o = run(&["refine", "--body", s(&corners.body), "--points", s(&corners.points), "--epsilon", "1/5", "--steps", "0"]);
    assert_eq!(o.status.code(), Some(12));

    let o = run(&["refine", "--body", s(&corners.body), "--points", s(&corners.points), "--epsilon", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn refine_survey_lists_every_placement() {
    let corners = fixture("opposite-corners");
    let o = run(&[
        "refine", "--body", s(&corners.body), "--points", s(&corners.points), "--epsilon", "1/5", "--survey", "--policy", "all",
        "--steps", "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o).as_array().unwrap().len(), 2 * 9);
}

#[test]
fn escape_reports() {
    let remark = fixture("remark");
    let o = run(&["escape", "--body", s(&remark.body), "--points", s(&remark.points)]);
    let v = json(&o);
    assert_eq!(v["family"]["kind"], "translation");
    assert_eq!(v["family"]["direction"], serde_json::json!(["1", "0"]));
    assert_eq!(v["magnitudes"].as_array().unwrap().len(), 10);

    let corners = fixture("opposite-corners");
    let v = json(&run(&["escape", "--body", s(&corners.body), "--points", s(&corners.points)]));
    assert_eq!(v["family"]["kind"], "rotation");
    assert_eq!(v["family"]["center"], serde_json::json!(["0", "0"]));
    assert_eq!(v["family"]["sense"], "CW");

    let straddle = fixture("straddle");
    let o = run(&["escape", "--body", s(&straddle.body), "--points", s(&straddle.points), "--samples", "500", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "none\n");
}

#[test]
fn fuzz_summary() {
    let o = run(&["fuzz", "--seed", "1", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["trials"], 0);
    assert!(v["violations"].as_array().unwrap().is_empty());

    let args = ["fuzz", "--seed", "5", "--trials", "12", "--escape-samples", "200"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, run(&args).stdout);
    assert_eq!(run(&["fuzz", "--trials", "100001"]).status.code(), Some(1));
}

#[test]
fn render_outputs() {
    let remark = fixture("remark");
    let verdict = remark.path("v.json");
    run(&["classify", "--mode", "fix", "--body", s(&remark.body), "--points", s(&remark.points), "--out", &verdict]);
    let svg = remark.path("r.svg");
    let o = run(&["render", "--body", s(&remark.body), "--points", s(&remark.points), "--verdict", &verdict, "--svg", &svg]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("class=\"normal\"").count(), 3);
    assert!(text.contains("<line class=\"witness\""));

    let empty = remark.path("empty.json");
    std::fs::write(&empty, "[]").unwrap();
    let o = run(&["render", "--body", s(&remark.body), "--points", &empty, "--svg", &svg, "--window", "-3,-1,3,2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("class=\"body\"") && !text.contains("class=\"point\""));

    let o = run(&["render", "--body", s(&remark.body), "--points", &empty, "--svg", &svg, "--window", "1,2,3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical() {
    let f = fixture("opposite-corners");
    let a = classify(&f, "fix");
    assert_eq!(a.stdout, classify(&f, "fix").stdout);
    let esc = ["escape", "--body", s(&f.body), "--points", s(&f.points), "--seed", "9"];
    assert_eq!(run(&esc).stdout, run(&esc).stdout);
}

#[test]
fn curved_fixture_export() {
    let f = fixture("e1-4");
    let body: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&f.body).unwrap()).unwrap();
    assert_eq!(body["mode"], "tolerant");
    assert_eq!(classify(&f, "fix").status.code(), Some(20));
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["fixture", "nonsense", "--body-out", s(&dir.path().join("b")), "--points-out", s(&dir.path().join("p"))]);
    assert_eq!(o.status.code(), Some(1));
}
