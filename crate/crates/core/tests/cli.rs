//! The `toa-lab` binary end to end: exit codes, overrides, CSV → SVG.

use std::path::Path;
use std::process::{Command, Output};

use toa_core::cli::{render_svg, Table};

fn toa_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toa-lab")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn writes_csv_and_svg_from_preset() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig2.csv");
    let svg = dir.path().join("fig2.svg");
    let out = toa_lab(&["fig2", "--config", "fig2", "--csv", path_str(&csv), "--svg", path_str(&svg), "--T", "1,10,100"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let table = Table::parse_csv(&text).unwrap();
    assert_eq!(table.columns, ["T_dimensionless", "P_na_QC", "P_na_K", "P_na_F", "P_na_SC"]);
    assert_eq!(table.rows.len(), 4, "T -> 0 row plus three windows");
    assert!(table.comments.iter().any(|c| c == "T_values = [1.0, 10.0, 100.0]"));
    assert_eq!(std::fs::read_to_string(&svg).unwrap(), render_svg(&text).unwrap());
}

#[test]
fn csv_goes_to_stdout_without_a_path() {
    let out = toa_lab(&["asymptote", "--config", "asymptote-odd"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# status: bounded denominator — no divergence"));
    assert!(Table::parse_csv(&text).unwrap().rows.len() > 10);
}

#[test]
fn delta_l_override_switches_to_interval() {
    let out = toa_lab(&["asymptote", "--config", "asymptote", "--delta-l", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# detector = \"interval\"") && text.contains("# delta_l = 2.0"));
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(toa_lab(&["fig1", "--config", "no-such-preset"]).status.code(), Some(2));
    assert_eq!(toa_lab(&["sweep", "--config", "sweep", "--T", "0.01,1"]).status.code(), Some(2));
    assert_eq!(toa_lab(&["fig1", "--config", "fig1", "--tol", "1e-15"]).status.code(), Some(2));
    assert_eq!(toa_lab(&["fig1", "--config", "fig1", "--T", "2,1"]).status.code(), Some(2));
    assert_eq!(toa_lab(&["fig1", "--config", "fig1", "--csv", "/no/such/dir/out.csv"]).status.code(), Some(2));
    assert_eq!(toa_lab(&["bogus", "--config", "fig1"]).status.code(), Some(2));
}

#[test]
fn degenerate_normalization_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("node.toml");
    // the odd state vanishes identically at its node
    std::fs::write(
        &cfg,
        "packet = \"odd\"\nodd_offset = 2.0\ndetector = \"point\"\ndetector_x = 0.0\nT_values = [1.0, 10.0, 100.0, 1000.0, 10000.0]\n",
    )
    .unwrap();
    assert_eq!(toa_lab(&["asymptote", "--config", path_str(&cfg)]).status.code(), Some(4));
}

#[test]
fn config_file_path_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("slow.toml");
    std::fs::write(
        &cfg,
        "x0 = -1.0\np0 = 0.2\nT_values = [1.0, 10.0, 100.0, 1000.0, 10000.0, 100000.0, 1000000.0]\nwindow_t1 = 0.1\nwindow_t2 = 0.4\n",
    )
    .unwrap();
    let out = toa_lab(&["sweep", "--config", path_str(&cfg)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = Table::parse_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let p: Vec<f64> = table.column("P_QC_arrival").unwrap().into_iter().flatten().collect();
    assert!(p.windows(2).all(|w| w[1] < w[0]));
}
