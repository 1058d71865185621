use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use phasegroup::Matrix;
use phasegroup_cli::config::{self, CasimirConfig, CompatConfig, DecomposeConfig, EvolveConfig, ExamplesConfig, FeConfig, PhiConfig};

fn bin(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasegroup"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn config_arg(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

/// Data rows of a CSV written by the CLI, after checking the comment and header rows.
fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# seed="), "{comment}");
    assert!(comment.contains("tolerance=") && comment.contains("steps="));
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    for r in &rows {
        assert_eq!(r.len(), header.len());
    }
    (header, rows)
}

#[test]
fn decompose_identity_gives_identity_factors() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(dir.path(), &["--config", &config_arg("decompose_identity.json"), "decompose"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("decompose.json")).unwrap()).unwrap();
    for key in ["u", "gamma_left", "gamma_right", "v"] {
        let m = Matrix::try_from(&serde_json::from_value::<phasegroup::MatrixJson>(v[key].clone()).unwrap()).unwrap();
        assert_eq!(m, Matrix::identity(2), "{key}");
    }
    let (_, rows) = csv_rows(&dir.path().join("decompose.csv"));
    assert_eq!(rows.len(), 1);
}

#[test]
fn unitary_start_does_not_move() {
    let dir = tempfile::tempdir().unwrap();
    let g0 = r#"{"n":2,"re":[[0,1],[-1,0]],"im":[[0,0],[0,0]]}"#;
    let out = bin(dir.path(), &["evolve-sun", "--g0", g0, "--steps", "50"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&dir.path().join("evolve_sun.csv"));
    assert_eq!(header, ["t", "H", "detdrift", "gammaLdrift", "gammaRdrift"]);
    assert_eq!(rows.len(), 51);
    for r in &rows {
        assert_eq!(r[1], "1");
        assert!(r[2..].iter().all(|x| x == "0"));
    }
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("evolve_sun_final.json")).unwrap()).unwrap();
    assert_eq!(v["g"], v["g0"]);
}

#[test]
fn default_compat_residuals_are_positive() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(dir.path(), &["compat", "--steps", "200"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&dir.path().join("compat.csv"));
    assert_eq!(header, ["epsilon", "c", "variant", "v_id", "residual"]);
    assert_eq!(rows.len(), 16 * 3);
    for r in &rows {
        assert!(r[4].parse::<f64>().unwrap() > 0.0);
    }
    let (_, ranked) = csv_rows(&dir.path().join("compat_ranking.csv"));
    assert_eq!(ranked.len(), 1);
}

#[test]
fn compat_scan_emits_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(dir.path(), &["compat", "--steps", "100", "--directions", "1", "--scan", "0.5:2:2,1:3:3"]);
    assert!(out.status.success());
    let (_, ranked) = csv_rows(&dir.path().join("compat_ranking.csv"));
    assert_eq!(ranked.len(), 6);
    let means: Vec<f64> = ranked.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(means.windows(2).all(|w| w[0] <= w[1]));
    let (_, rows) = csv_rows(&dir.path().join("compat.csv"));
    assert_eq!(rows.len(), 6 * 4 * 3);
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"n": 2, "unknown": 1}"#).unwrap();
    let out = bin(dir.path(), &["--config", bad.to_str().unwrap(), "phi"]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(bin(dir.path(), &["--config", bad.to_str().unwrap(), "fe-maps"]).status.code(), Some(2));
    assert_eq!(bin(dir.path(), &["compat", "--scan", "1:2"]).status.code(), Some(2));
    assert_eq!(bin(dir.path(), &["compat", "--scan", "-1:1:3,1:2:2"]).status.code(), Some(2));
    assert_eq!(bin(dir.path(), &["phi", "--n", "1"]).status.code(), Some(2));
    assert_eq!(bin(dir.path(), &["examples", "run", "4"]).status.code(), Some(2));
    // not in SL(2, C)
    let g = r#"{"n":2,"re":[[2,0],[0,2]],"im":[[0,0],[0,0]]}"#;
    assert_eq!(bin(dir.path(), &["decompose", "--g", g]).status.code(), Some(2));
    assert!(!dir.path().join("decompose.csv").exists());
}

#[test]
fn numerical_abort_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.json");
    fs::write(&cfg, r#"{"radius": 1e-3}"#).unwrap();
    let out = bin(dir.path(), &["--config", cfg.to_str().unwrap(), "examples", "run", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radius"));
}

#[test]
fn invariant_violation_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(dir.path(), &["evolve-sun", "--steps", "4", "--tolerance", "1e-12"]);
    assert_eq!(out.status.code(), Some(4));
    // the trajectory is still written for inspection
    assert!(dir.path().join("evolve_sun.csv").exists());
    let out = bin(dir.path(), &["phi", "--oracle", "--steps", "3", "--tolerance", "1e-14"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn seed_override_changes_samples() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(bin(a.path(), &["fe-maps", "--samples", "3"]).status.success());
    assert!(bin(b.path(), &["--seed", "7", "fe-maps", "--samples", "3"]).status.success());
    let x = fs::read_to_string(a.path().join("fe_maps.csv")).unwrap();
    let y = fs::read_to_string(b.path().join("fe_maps.csv")).unwrap();
    assert_ne!(x, y);
    assert!(y.starts_with("# seed=7 "));
}

#[test]
fn phi_prints_gamma_and_grid_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let eta = r#"{"n":2,"re":[[0,0],[0,0]],"im":[[0.5,0],[0,-0.5]]}"#;
    let out = bin(dir.path(), &["phi", "--eta0", eta]);
    assert!(out.status.success());
    let first = String::from_utf8_lossy(&out.stdout).lines().next().unwrap().to_string();
    let gamma = Matrix::from_json_str(&first).unwrap();
    // diagonal momentum: gamma(1) = diag(e^{1/2}, e^{-1/2})
    assert!(gamma.distance(&Matrix::from_real_diag(&[0.5f64.exp(), (-0.5f64).exp()])) < 1e-10);
    let out = bin(dir.path(), &["phi", "--grid", "--steps", "200"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&dir.path().join("phi_grid.csv"));
    assert_eq!(rows.len(), 20);
    assert_eq!(header[0], "eta_id");
    assert_eq!(header.last().unwrap(), "det_residual");
}

#[test]
fn examples_and_casimir_write_samples() {
    let dir = tempfile::tempdir().unwrap();
    for which in ["1", "2", "3"] {
        assert!(bin(dir.path(), &["examples", "run", which]).status.success());
    }
    let (h1, r1) = csv_rows(&dir.path().join("example1.csv"));
    assert_eq!(r1.len(), 50);
    assert_eq!(h1.last().unwrap(), "anchor_drift");
    let (_, r3) = csv_rows(&dir.path().join("example3_phase_lift.csv"));
    assert_eq!(r3.len(), 20 * 5);
    assert!(bin(dir.path(), &["casimir-checks", "--samples", "3"]).status.success());
    let (h, r) = csv_rows(&dir.path().join("casimir_checks.csv"));
    assert_eq!(r.len(), 3);
    assert_eq!(&h[h.len() - 3..], ["commutation", "isotropy", "matched"]);
}

#[test]
fn shipped_configs_parse_and_validate() {
    let p = |name: &str| configs().join(name);
    config::load::<DecomposeConfig>(Some(&p("decompose.json"))).unwrap().validate().unwrap();
    config::load::<DecomposeConfig>(Some(&p("decompose_identity.json"))).unwrap().validate().unwrap();
    config::load::<EvolveConfig>(Some(&p("evolve_sun.json"))).unwrap().validate().unwrap();
    config::load::<FeConfig>(Some(&p("fe_maps.json"))).unwrap().validate().unwrap();
    config::load::<PhiConfig>(Some(&p("phi.json"))).unwrap().validate().unwrap();
    config::load::<CompatConfig>(Some(&p("compat.json"))).unwrap().validate().unwrap();
    config::load::<ExamplesConfig>(Some(&p("examples.json"))).unwrap().validate().unwrap();
    config::load::<CasimirConfig>(Some(&p("casimir_checks.json"))).unwrap().validate().unwrap();
}
