use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn cogsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cogsec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gauss_writes_alpha_rows_frontier_and_manifest() {
    let dir = TempDir::new().unwrap();
    let o = cogsec(&[
        "gauss", "--mode", "thm7", "--a", "1", "--b", "0.5", "--p1", "20", "--p2", "20", "--steps", "200",
        "--out", s(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = fs::read_to_string(dir.path().join("gauss_thm7_alpha.csv")).unwrap();
    assert_eq!(rows.lines().count(), 202);
    assert_eq!(rows.lines().next(), Some("alpha,R1,R2,Re1"));
    assert!(rows.lines().nth(1).unwrap().split(',').all(|c| c.split('.').nth(1).is_some_and(|d| d.len() == 9)));
    assert!(dir.path().join("gauss_thm7_frontier.csv").exists());
    let m = json(dir.path().join("gauss.manifest.json"));
    assert_eq!(m["command"], "gauss");
    assert_eq!(m["config"]["steps"], 200);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn gauss_rejects_violated_hypothesis() {
    let dir = TempDir::new().unwrap();
    let o = cogsec(&["gauss", "--mode", "thm3", "--a", "1", "--b", "0.5", "--p1", "20", "--p2", "20", "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("ab = 1"), "{}", stderr(&o));
}

#[test]
fn gauss_cor3_strong_cross_link_has_zero_r1() {
    let dir = TempDir::new().unwrap();
    let o = cogsec(&["gauss", "--mode", "cor3", "--a", "1", "--b", "2", "--p1", "20", "--p2", "20", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = fs::read_to_string(dir.path().join("gauss_cor3_alpha.csv")).unwrap();
    assert!(rows.lines().skip(1).all(|l| l.split(',').nth(1) == Some("0.000000000")));
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("g.json");
    fs::write(&cfg, r#"{"mode":"thm7","a":1,"b":0.5,"p1":20,"p2":20,"steps":50}"#).unwrap();
    let o = cogsec(&["gauss", "--config", s(&cfg), "--steps", "10", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = fs::read_to_string(dir.path().join("gauss_thm7_alpha.csv")).unwrap();
    assert_eq!(rows.lines().count(), 12);

    let o = cogsec(&["gauss", "--config", s(&dir.path().join("missing.json"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn figure2_files_and_byte_identical_rerun() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for d in [&a, &b] {
        let o = cogsec(&["figure2", "--out", s(d.path())]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for name in ["fig2_b0.25.csv", "fig2_b0.5.csv", "fig2_b0.75.csv", "fig2_b1.0.csv"] {
        let x = fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let b1 = fs::read_to_string(a.path().join("fig2_b1.0.csv")).unwrap();
    let header: Vec<&str> = b1.lines().next().unwrap().split(',').collect();
    let re1 = header.iter().position(|h| *h == "Re1").unwrap();
    assert!(b1.lines().skip(1).all(|l| l.split(',').nth(re1) == Some("0.000000000")));
}

#[test]
fn discrete_inner_search_on_orthogonal_channel() {
    let dir = TempDir::new().unwrap();
    let o = cogsec(&[
        "discrete", "--bound", "inner", "--channel", s(&data("orthogonal.json")), "--cards", "1,1,1,2",
        "--samples", "200", "--seed", "3", "--out", s(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("inner_frontier.csv")).unwrap();
    let hit = csv.lines().skip(1).any(|l| {
        l.split(',').map(|c| c.parse::<f64>().unwrap()).zip([0.95, 0.95, 0.95, 0.0]).all(|(x, t)| x >= t)
    });
    assert!(hit, "{csv}");
    let rows = csv.lines().count() - 1;
    let sidecars = fs::read_dir(dir.path().join("inner_aux")).unwrap().count();
    assert_eq!(sidecars, rows);
    let point = json(dir.path().join("inner_aux/point_0000.json"));
    assert!(point["aux"]["axes"].is_array());

    // rerun from the manifest reproduces the frontier exactly
    let again = TempDir::new().unwrap();
    let manifest = dir.path().join("discrete.manifest.json");
    let o = cogsec(&["discrete", "--config", s(&manifest), "--out", s(again.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(csv, fs::read_to_string(again.path().join("inner_frontier.csv")).unwrap());
}

#[test]
fn discrete_structured_candidates_alone_emit_a_frontier() {
    let dir = TempDir::new().unwrap();
    let o = cogsec(&[
        "discrete", "--bound", "semi-det", "--channel", s(&data("xor-identical.json")), "--samples", "0",
        "--out", s(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("semi-det_frontier.csv")).unwrap();
    assert!(csv.lines().count() > 1);
}

#[test]
fn discrete_rejects_unknown_bound() {
    let o = cogsec(&["discrete", "--bound", "widest", "--channel", s(&data("orthogonal.json"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unknown bound"));
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let o = cogsec(&["check", "--channel", s(&data("xor-identical.json")), "--condition", "semi-det", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = json(dir.path().join("check_report.json"));
    assert_eq!(report["max_gap"], 0.0);

    let o = cogsec(&["check", "--channel", s(&data("orthogonal.json")), "--condition", "semi-det", "--out", s(dir.path())]);
    assert_eq!(code(&o), 3);
    let report = json(dir.path().join("check_report.json"));
    assert_eq!(report["violated"], true);
    assert!(report["witness"].is_object());

    let o = cogsec(&["check", "--channel", s(&dir.path().join("none.json")), "--condition", "semi-det", "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("none.json"));
}

#[test]
fn simulate_zero_rate_and_rate_violation() {
    let dir = TempDir::new().unwrap();
    let o = cogsec(&["simulate", "--config", s(&data("sim-zero-rate.json")), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(dir.path().join("sim_report.json"));
    for k in ["encoding_failure_rate", "decode1_error_rate", "decode2_error_rate"] {
        assert_eq!(r[k]["events"], 0, "{k}");
    }

    let o = cogsec(&["simulate", "--config", s(&data("sim-orthogonal.json")), "--r1", "1.2", "--out", s(dir.path())]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("R1 < I(U;Y1) - I(U;X2)"), "{}", stderr(&o));
}

#[test]
fn simulate_rerun_from_manifest_is_identical() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let o = cogsec(&["simulate", "--config", s(&data("sim-orthogonal.json")), "--trials", "100", "--out", s(a.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let manifest = a.path().join("simulate.manifest.json");
    assert_eq!(json(&manifest)["config"]["trials"], 100);
    let o = cogsec(&["simulate", "--config", s(&manifest), "--out", s(b.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        fs::read(a.path().join("sim_report.json")).unwrap(),
        fs::read(b.path().join("sim_report.json")).unwrap()
    );
    let r = json(a.path().join("sim_report.json"));
    let h = r["exact_equivocation_m1_at_y2"].as_f64().unwrap() / 8.0;
    assert!((h - 0.5).abs() <= 0.1);
}

#[test]
fn manifest_for_another_command_is_rejected() {
    let dir = TempDir::new().unwrap();
    let o = cogsec(&["figure2", "--steps", "4", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0);
    let o = cogsec(&["gauss", "--config", s(&dir.path().join("figure2.manifest.json"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("manifest is for `figure2`"));
}

#[test]
fn verify_gaussian_suite_lists_every_criterion() {
    let dir = TempDir::new().unwrap();
    let o = cogsec(&["verify", "--suite", "gaussian", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let summary = json(dir.path().join("verify_summary.json"));
    let ids: Vec<u64> = summary["criteria"].as_array().unwrap().iter().map(|c| c["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, (1..=10).collect::<Vec<_>>());
    assert_eq!(summary["passed"], true);
    let o = cogsec(&["verify", "--suite", "everything", "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
}
