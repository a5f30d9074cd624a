use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fusion21"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("fusion21-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().expect("binary runs");
    (status.code().unwrap_or(-1), String::from_utf8(stdout).unwrap(), String::from_utf8(stderr).unwrap())
}

#[test]
fn bracket_vanishes_at_origin() {
    let (rc, out, _) = run(bin().args(["eval", "bracket", "--u", "0", "--r", "4", "--eps", "1"]));
    assert_eq!(rc, 0);
    let v: f64 = out.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert_eq!(v, 0.0);
}

#[test]
fn r21_at_zero_is_permutation() {
    let (rc, out, _) = run(bin().args(["eval", "r21", "--u", "0"]));
    assert_eq!(rc, 0);
    for line in out.lines().skip(1) {
        let (idx, val) = line.trim().rsplit_once("  ").unwrap();
        let idx: Vec<i32> = idx.trim_matches(['[', ']']).split(", ").map(|s| s.parse().unwrap()).collect();
        let want = if idx[0] == idx[3] && idx[1] == idx[2] { 1.0 } else { 0.0 };
        assert_eq!(val.parse::<f64>().unwrap().abs(), want, "{line}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(bin().args(["eval", "nonsense"])).0, 2);
    assert_eq!(run(bin().args(["eval", "bracket", "--u", "zero"])).0, 2);
    assert_eq!(run(bin().args(["frobnicate"])).0, 2);
    assert_eq!(run(bin().args(["ope", "--pair", "NoSuchPair"])).0, 2);
}

#[test]
fn characters_table_matches() {
    let (rc, out, _) = run(bin().args(["characters", "--i", "0", "--emax", "12"]));
    assert_eq!(rc, 0);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 13);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
    let (_, out1, _) = run(bin().args(["characters", "--i", "1", "--emax", "4"]));
    assert!(out1.lines().nth(1).unwrap().starts_with("0,1,1,"));
}

#[test]
fn ope_residuals_small() {
    let (rc, out, _) = run(bin().args(["ope", "--pair", "Phi1Phi1", "--n", "12"]));
    assert_eq!(rc, 0);
    for line in out.lines().skip(1) {
        let res: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(res < 1e-9, "{line}");
    }
}

#[test]
fn single_check_filter_writes_only_that_check() {
    let dir = scratch("only");
    let (rc, out, _) = run(bin().args(["check", "--only", "check_three_term_identity"]).env("FUSION21_OUT_DIR", &dir));
    assert_eq!(rc, 0);
    assert!(out.starts_with("# x=0.3 r=4.5"));
    let csv = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    let ids: std::collections::BTreeSet<&str> = csv.lines().skip(2).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids.into_iter().collect::<Vec<_>>(), ["check_three_term_identity"]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["checks"].as_array().unwrap().len(), 100);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn unmatched_filter_and_bad_config_exit_2() {
    let dir = scratch("bad");
    assert_eq!(run(bin().args(["check", "--only", "check_nothing"]).env("FUSION21_OUT_DIR", &dir)).0, 2);
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"x": 0.3, "colour": "blue"}"#).unwrap();
    let (rc, _, err) = run(bin().arg("check").arg(&cfg).env("FUSION21_OUT_DIR", &dir));
    assert_eq!(rc, 2);
    assert!(err.contains("colour"), "{err}");
    std::fs::write(&cfg, "{ not json").unwrap();
    assert_eq!(run(bin().arg("check").arg(&cfg)).0, 2);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn default_suite_reports_known_failures() {
    let dir = scratch("full");
    let (rc, out, _) = run(bin().arg("check").env("FUSION21_OUT_DIR", &dir));
    assert_eq!(rc, 1);
    assert!(out.contains("FAIL check_fusion_projector"));
    assert!(out.contains("PASS check_ybe_R8"));
    let first = std::fs::read(dir.join("report.json")).unwrap();
    assert_eq!(run(bin().arg("check").env("FUSION21_OUT_DIR", &dir)).0, 1);
    assert_eq!(std::fs::read(dir.join("report.json")).unwrap(), first);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn config_file_is_honoured() {
    let dir = scratch("cfg");
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 7, "only": ["check_addition_theorem"], "samples": {"theta": 10}}"#).unwrap();
    let (rc, out, _) = run(bin().arg("check").arg(&cfg).env("FUSION21_OUT_DIR", &dir));
    assert_eq!(rc, 0);
    assert!(out.contains("seed=7"));
    assert!(out.contains("10/10"));
    std::fs::remove_dir_all(dir).unwrap();
}
