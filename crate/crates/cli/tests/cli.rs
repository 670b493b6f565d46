use enclosure::forward::load_matrix;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/disc_scene.json")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enclosure")).args(args).env_remove("ENCLOSURE_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn error_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

fn forward(dir: &Path, nodes: &str) -> PathBuf {
    let out = dir.join(format!("F{nodes}.ffm"));
    let o = run(&["forward", "--scene", fixture().to_str().unwrap(), "--nodes", nodes, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn probe(matrix: &Path, extra: &[&str]) -> Output {
    let scene = fixture();
    let mut args = vec!["probe", "--matrix", matrix.to_str().unwrap(), "--scene", scene.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn forward_writes_checked_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("F.ffm");
    let scene = fixture();
    let args = ["forward", "--scene", scene.to_str().unwrap(), "--nodes", "128", "--out", out.to_str().unwrap()];
    let o = run(&args);
    assert!(o.status.success());
    let summary: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(summary["reciprocity_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(summary["eigen_guard"]["warning"], Value::Bool(false));
    let f = load_matrix(&out).unwrap();
    assert_eq!((f.m, f.k), (128, 2.0));
    let first = std::fs::read(&out).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(first, std::fs::read(&out).unwrap());
}

#[test]
fn malformed_scene_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"k\": 2,").unwrap();
    let o = run(&["forward", "--scene", bad.to_str().unwrap(), "--out", dir.path().join("F.ffm").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert_eq!(e["error"]["kind"], "format");
    assert_eq!(e["exit_code"], 2);
}

#[test]
fn odd_node_count_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        run(&["forward", "--scene", fixture().to_str().unwrap(), "--nodes", "129", "--out", dir.path().join("F.ffm").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["kind"], "precondition");
}

#[test]
fn unknown_flag_is_input_error() {
    let o = run(&["forward", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["kind"], "usage");
}

#[test]
fn probe_classifications_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let f = forward(dir.path(), "160");
    let hit = probe(&f, &["--apex", "-1,0", "--omega", "0", "--n", "1"]);
    assert!(hit.status.success());
    assert!(stdout(&hit).contains("classification=Growth"));
    let csv = dir.path().join("trace.csv");
    let miss = probe(&f, &["--apex", "-1,0", "--omega", "3.141592653589793", "--n", "2", "--out", csv.to_str().unwrap()]);
    assert!(miss.status.success());
    assert!(!stdout(&miss).contains("Growth"));
    let trace = std::fs::read_to_string(&csv).unwrap();
    assert!(trace.starts_with("N,s,Re(I),Im(I),abs(I)\n"));
    assert_eq!(trace.lines().count(), 18);

    let mismatch = probe(&f, &["--k", "3"]);
    assert_eq!(mismatch.status.code(), Some(3));
    assert_eq!(error_json(&mismatch)["error"]["kind"], "consistency");
    let short = probe(&f, &["--n-min", "8", "--n-max", "8"]);
    assert_eq!(short.status.code(), Some(2));
    assert_eq!(error_json(&short)["error"]["kind"], "precondition");
    let low = forward(dir.path(), "64");
    let unresolved = probe(&low, &["--n", "2"]);
    assert_eq!(unresolved.status.code(), Some(2));
    assert_eq!(error_json(&unresolved)["error"]["kind"], "resolution");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::copy(fixture(), dir.path().join("scene.json")).unwrap();
    std::fs::write(&cfg, r#"{"scene": "scene.json", "nodes": 96, "out": "F.ffm", "seed": 4}"#).unwrap();
    let o = run(&["forward", "--config", cfg.to_str().unwrap(), "--nodes", "80"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(load_matrix(&dir.path().join("F.ffm")).unwrap().m, 80);
    std::fs::write(&cfg, r#"{"scene": "scene.json", "typo": 1}"#).unwrap();
    assert_eq!(run(&["forward", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn noise_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let make = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o =
            run(&["forward", "--scene", fixture().to_str().unwrap(), "--noise", "1e-3", "--seed", seed, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        std::fs::read(out).unwrap()
    };
    assert_eq!(make("a", "1"), make("b", "1"));
    assert_ne!(make("a", "1"), make("c", "2"));
}

#[test]
fn scan_is_thread_independent_and_sound() {
    let dir = tempfile::tempdir().unwrap();
    let f = forward(dir.path(), "160");
    let scan = |threads: &str| {
        let csv = dir.path().join(format!("map{threads}.csv"));
        let pgm = dir.path().join(format!("map{threads}.pgm"));
        let o = run(&[
            "scan",
            "--matrix",
            f.to_str().unwrap(),
            "--scene",
            fixture().to_str().unwrap(),
            "--count",
            "9",
            "--omegas",
            "8",
            "--threads",
            threads,
            "--out-csv",
            csv.to_str().unwrap(),
            "--out-pgm",
            pgm.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).contains("81/81"));
        (std::fs::read_to_string(csv).unwrap(), std::fs::read(pgm).unwrap())
    };
    let (c1, p1) = scan("1");
    let (c8, p8) = scan("8");
    assert_eq!(c1, c8);
    assert_eq!(p1, p8);
    assert!(p1.starts_with(b"P5\n9 9\n255\n"));
    for line in c1.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let (x1, x2): (f64, f64) = (cols[0].parse().unwrap(), cols[1].parse().unwrap());
        if (x1 - 0.5).hypot(x2) < 0.3 {
            assert_eq!(cols[2], "NotShownVisible", "{line}");
        }
    }
    let outside =
        run(&["scan", "--matrix", f.to_str().unwrap(), "--scene", fixture().to_str().unwrap(), "--half", "1.5", "--out-csv", "x.csv"]);
    assert_eq!(outside.status.code(), Some(2));
}

#[test]
fn verify_filters_suites() {
    let o = run(&["verify", "--suite", "ml-asymptotics"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("PASS ml-asymptotics"));
    assert_eq!(text.lines().filter(|l| !l.starts_with(' ')).count(), 1);
    assert_eq!(run(&["verify", "--suite", "nonexistent"]).status.code(), Some(2));
}

#[test]
fn verify_all_suites_pass() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 8);
}

#[test]
fn ml_eval_reports_all_three() {
    let o = run(&["ml-eval", "--n", "1", "--x", "0.5,0", "--tau", "2", "--k", "1"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let e = v["mittag_leffler"][0].as_f64().unwrap();
    assert!((e - 1f64.exp()).abs() < 1e-13);
    assert!(v["modified"].is_array() && v["herglotz"]["value"].is_array());
}
