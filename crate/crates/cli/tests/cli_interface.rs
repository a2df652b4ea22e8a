//! End-to-end checks of the command-line surface: exit codes, the
//! file-override interface of the correlation subcommand, thread-cap
//! invariance of the emitted bytes and report content spot checks.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cfslab")
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    write(&cfg, r#"{"experiment": "kernel-diag", "unknown_field": 1}"#);
    let status = Command::new(bin())
        .args(["kernel-diag", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn negative_epsilon_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    write(
        &cfg,
        r#"{"experiment": "kernel-diag", "cutoff": {"kind": "sharp", "epsilon": -0.5}}"#,
    );
    let status = Command::new(bin())
        .args(["kernel-diag", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn mismatched_subcommand_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("kd.json");
    write(
        &cfg,
        r#"{"experiment": "kernel-diag", "cutoff": {"kind": "sharp", "epsilon": 0.5}}"#,
    );
    let status = Command::new(bin())
        .args(["decay", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn failed_assertion_exits_4() {
    // a two-point injectivity grid with identical points cannot separate
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("inj.json");
    write(
        &cfg,
        r#"{
          "experiment": "injectivity",
          "cutoff": {"kind": "sharp", "epsilon": 0.2},
          "family": [
            {"sign": "negative", "spin": "up", "profile": "narrow_gaussian",
             "sigma": 0.3, "momentum_center": [0.0, 0.0, 0.0]}
          ],
          "points": [[0,0,0,0], [0,0,0,0]]
        }"#,
    );
    let status = Command::new(bin())
        .args(["injectivity", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));
}

#[test]
fn correlation_accepts_file_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("f.json");
    write(
        &fam,
        r#"{"family": [
          {"sign": "negative", "spin": "up", "profile": "special_b", "sigma": 1.0},
          {"sign": "negative", "spin": "down", "profile": "special_b", "sigma": 1.0},
          {"sign": "negative", "spin": "up", "profile": "special_a", "sigma": 1.0},
          {"sign": "negative", "spin": "down", "profile": "special_a", "sigma": 1.0}
        ]}"#,
    );
    let pts = dir.path().join("grid.json");
    write(&pts, r#"{"points": [[0,0,0,0]]}"#);
    let cut = dir.path().join("c.json");
    write(&cut, r#"{"kind": "sharp", "epsilon": 0.1}"#);
    let out = dir.path().join("out");
    let status = Command::new(bin())
        .args(["correlation", "--family"])
        .arg(&fam)
        .arg("--points")
        .arg(&pts)
        .arg("--cutoff")
        .arg(&cut)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("correlation.json")).unwrap())
            .unwrap();
    let rec = &report["records"][0];
    assert_eq!(rec["rank"], 4);
    assert_eq!(rec["n_plus"], 2);
    assert_eq!(rec["n_minus"], 2);
}

#[test]
fn kernel_diag_reports_reference_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("kd.json");
    write(
        &cfg,
        r#"{"experiment": "kernel-diag", "m": 1.0, "cutoff": {"kind": "sharp", "epsilon": 0.1}}"#,
    );
    let out = dir.path().join("out");
    let status = Command::new(bin())
        .args(["kernel-diag", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("kernel-diag.json")).unwrap())
            .unwrap();
    let rec = &report["records"][0];
    let lp = rec["lambda_plus"].as_f64().unwrap();
    let lm = rec["lambda_minus"].as_f64().unwrap();
    assert!((lp - 1.54035).abs() < 1e-4);
    assert!((lm + 1.14728).abs() < 1e-4);
    // every assertion carries both numeric sides
    for a in report["assertions"].as_array().unwrap() {
        assert!(a["lhs"].is_number() || a["lhs"].is_string());
        assert!(a["rhs"].is_number());
        assert!(a["id"].is_string());
    }
}

#[test]
fn thread_cap_does_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.json");
    write(
        &cfg,
        r#"{"experiment": "kernel-grid", "m": 1.0,
           "cutoff": {"kind": "sharp", "epsilon": 0.5},
           "xi_grid": [[0,0,0,0], [0.2, 0.4, 0.1, -0.3], [1.0, 0.0, 0.0, 0.5]]}"#,
    );
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("out{threads}"));
        let status = Command::new(bin())
            .env("CFSLAB_THREADS", threads)
            .args(["kernel-grid", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        outputs.push(std::fs::read(out.join("kernel-grid.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn injectivity_subcommand_separates_distinct_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("inj.json");
    write(
        &cfg,
        r#"{
          "experiment": "injectivity",
          "cutoff": {"kind": "sharp", "epsilon": 0.1},
          "family": [
            {"sign": "negative", "spin": "up", "profile": "narrow_gaussian",
             "sigma": 0.3, "momentum_center": [0.0, 0.0, 0.0]},
            {"sign": "negative", "spin": "up", "profile": "narrow_gaussian",
             "sigma": 0.3, "momentum_center": [0.8, 0.0, 0.0]},
            {"sign": "negative", "spin": "down", "profile": "narrow_gaussian",
             "sigma": 0.3, "momentum_center": [0.0, 0.9, 0.3]}
          ],
          "points": [[0,0,0,0], [0,1,0,0], [1,0,0,0], [0,0,1,1], [2,1,-1,0]]
        }"#,
    );
    let out = dir.path().join("out");
    let status = Command::new(bin())
        .args(["injectivity", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("injectivity.json")).unwrap())
            .unwrap();
    assert!(report["separated"].as_bool().unwrap());
    assert!(report["min_distance"].as_f64().unwrap() > 0.0);
    assert_eq!(report["records"].as_array().unwrap().len(), 10); // 5 choose 2
}

#[test]
fn perturbation_subcommand_seeded_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pert.json");
    write(
        &cfg,
        r#"{
          "experiment": "perturbation",
          "cutoff": {"kind": "sharp", "epsilon": 0.2},
          "random_sets": 2,
          "states_per_set": 2
        }"#,
    );
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("o{run}"));
        let status = Command::new(bin())
            .args(["perturbation", "--config"])
            .arg(&cfg)
            .args(["--seed", "11", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        outputs.push(std::fs::read(out.join("perturbation.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    // a different seed draws different states
    let out = dir.path().join("o2");
    let status = Command::new(bin())
        .args(["perturbation", "--config"])
        .arg(&cfg)
        .args(["--seed", "12", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let other = std::fs::read(out.join("perturbation.json")).unwrap();
    assert_ne!(outputs[0], other);
}

#[test]
fn regularity_subcommand_reports_rank_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("reg.json");
    write(
        &cfg,
        r#"{"experiment": "regularity", "cutoff": {"kind": "sharp", "epsilon": 0.1},
           "points": [[0.3, -0.2, 0.4, 0.0]]}"#,
    );
    let out = dir.path().join("out");
    let status = Command::new(bin())
        .args(["regularity", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("regularity.json")).unwrap())
            .unwrap();
    let rec = &report["records"][0];
    assert_eq!(rec["rank"], 4);
    assert_eq!(rec["signature"][0], 2);
    assert_eq!(rec["signature"][1], 2);
}

#[test]
fn decay_subcommand_reports_monotone_tail() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("decay.json");
    write(
        &cfg,
        r#"{
          "experiment": "decay",
          "family": [
            {"sign": "negative", "spin": "up", "profile": "special_a", "sigma": 1.0}
          ],
          "ray_direction": [0.0, 1.0, 0.0, 0.0],
          "radii": [0.0, 5.0, 10.0, 20.0, 40.0]
        }"#,
    );
    let out = dir.path().join("out");
    let status = Command::new(bin())
        .args(["decay", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("decay.json")).unwrap()).unwrap();
    let records = report["records"].as_array().unwrap();
    let first = records[0]["magnitude"].as_f64().unwrap();
    let last = records.last().unwrap()["magnitude"].as_f64().unwrap();
    assert!(last < first);
}

#[test]
fn holes_subcommand_reports_rank_and_micro() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("holes.json");
    write(
        &cfg,
        r#"{
          "experiment": "holes",
          "cutoff": {"kind": "sharp", "epsilon": 0.1},
          "family": [
            {"sign": "negative", "spin": "up", "profile": "special_a", "sigma": 0.5,
             "center": [0.0, 30.0, 0.0, 0.0]}
          ],
          "points": [[0,0,0,0]]
        }"#,
    );
    let out = dir.path().join("out");
    let status = Command::new(bin())
        .args(["holes", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("holes.json")).unwrap()).unwrap();
    let rec = &report["records"][0];
    assert_eq!(rec["rank"], 4);
    assert!(rec["micro_value"].as_f64().unwrap() > 0.0);
    assert!(rec["macroscopic"].as_bool().unwrap());
    assert_eq!(
        rec["lambda_vectors"].as_array().unwrap().len(),
        4,
        "one lambda vector per projected special solution"
    );
}
