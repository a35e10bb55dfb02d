use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bertini_lab::cli::{registry, EXIT_CAP, EXIT_CONFIG, EXIT_FAILED, EXIT_OK};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn bertini(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bertini"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("BERTINI_CENSUS_CAP")
        .output()
        .unwrap()
}

fn cfg(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

#[test]
fn avoidance_census_writes_exact_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = bertini(&["census", "--config", &cfg("avoidance.json"), "--threads", "2"], dir.path());
    assert_eq!(out.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("avoid_one_point.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("d,size,hits,inconclusive,empirical_num,empirical_den,predicted,abs_dev"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert_eq!((r[4], r[5], r[7]), ("1", "2", "0"));
    }
    assert!(dir.path().join("avoid_one_point.json").exists());
    assert!(dir.path().join("avoid_one_point.summary.txt").exists());
}

#[test]
fn zeta_table_reproduces_point_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = bertini(&["zeta", "--config", &cfg("zeta_p2.json")], dir.path());
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let csv = std::fs::read_to_string(dir.path().join("zeta_p2_f2.csv")).unwrap();
    let b: Vec<&str> = csv.lines().skip(1).take(3).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(b, ["7", "7", "22"]);
}

#[test]
fn lift_writes_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out = bertini(&["lift", "--config", &cfg("lift_quadric.json"), "--seed", "3"], dir.path());
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = std::fs::read_to_string(dir.path().join("lift_quadric_hyperplane.certificates.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["certificates"].as_array().unwrap().len(), 5);
}

#[test]
fn malformed_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind": "avoidance", "field": {"p": 2}, "n": 2, "colour": "blue"}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = bertini(&["census", "--config", bad.to_str().unwrap()], &out_dir);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    assert!(!out_dir.exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn subcommand_must_match_the_kind() {
    let dir = tempfile::tempdir().unwrap();
    let out = bertini(&["zeta", "--config", &cfg("avoidance.json")], dir.path());
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn tolerance_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict.json");
    std::fs::write(
        &path,
        r#"{"kind": "smooth_density", "name": "strict", "field": {"p": 2}, "n": 2,
            "degrees": {"lo": 2, "hi": 2}, "tolerance": {"default": 0.01}}"#,
    )
    .unwrap();
    let out = bertini(&["census", "--config", path.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(EXIT_FAILED));
    assert!(dir.path().join("out/strict.csv").exists());
}

#[test]
fn census_cap_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_bertini"))
        .args(["census", "--config", &cfg("smooth_plane_curves.json"), "--out"])
        .arg(dir.path().join("out"))
        .env("BERTINI_CENSUS_CAP", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CAP));
    assert!(String::from_utf8_lossy(&out.stderr).contains("BERTINI_CENSUS_CAP"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn list_names_every_kind() {
    let out = Command::new(env!("CARGO_BIN_EXE_bertini")).arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for info in registry() {
        assert!(text.contains(info.name), "{}", info.name);
    }
}

#[test]
fn shipped_configs_parse() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        bertini_lab::cli::ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
