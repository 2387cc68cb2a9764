use std::path::Path;
use std::process::{Command, Output};

fn levyheat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levyheat")).args(args).env("LEVYHEAT_THREADS", "1").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn symbol_table_has_header_and_17_digits() {
    let o = levyheat(&["symbol", "--normalize", "--rho-min", "0.1", "--rho-max", "10", "--per-decade", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rho,m,closed_form"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        let mantissa = r[1].split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{r:?}");
        let rho: f64 = r[0].parse().unwrap();
        let m: f64 = r[1].parse().unwrap();
        assert!((m - rho).abs() < 1e-6 * rho);
    }
}

#[test]
fn evolve_writes_fields_and_norms() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("ev");
    let o = levyheat(&[
        "evolve", "--near", "bounded:c0=1", "--tail", "exponential:lambda=1", "--sigma", "2", "--bound", "2",
        "--times", "0,0.5,1", "--fields", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["norms.csv", "field_0000.csv", "field_0002.csv", "manifest.txt", "symbol.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let norms = std::fs::read_to_string(out.join("norms.csv")).unwrap();
    assert!(norms.starts_with("t,l1,l2,lp,linf,energy\n"));
    assert_eq!(norms.lines().count(), 4);
}

#[test]
fn nash_check_writes_rows_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("nash");
    let o = levyheat(&["nash-check", "--r", "1.5", "--normalize", "--count", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("min_ratio = "));
    let rows = std::fs::read_to_string(out.join("analysis_0_nash_check.csv")).unwrap();
    assert!(rows.starts_with("sample_id,"));
    assert_eq!(rows.lines().count(), 6);
}

#[test]
fn regularity_reports_a_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("reg");
    let o = levyheat(&["regularity", "--normalize", "--at", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("CONVERGENT"), "{}", stdout(&o));
}

#[test]
fn decay_fit_runs_from_a_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        r#"name = "df"
[kernel]
dim = 1
near = { type = "fractional", beta = 1.0 }
tail = { type = "power", alpha = 1.0 }
normalize = true
[grid]
half_width = 8192.0
n = 131072
[flow]
type = "linear"
[initial]
type = "box"
width = 1.0
[snapshots]
type = "log"
t_min = 0.5
t_max = 4.0
count = 13
include_zero = true
[output]
dir = "run"
"#,
    )
    .unwrap();
    let o = levyheat(&["decay-fit", "--config", cfg.to_str().unwrap(), "--q", "1", "--p", "2", "--tolerance", "0.2"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("exponent"), "{}", stdout(&o));
    assert!(tmp.path().join("run/manifest.txt").exists());
}

#[test]
fn interpolation_rejects_open_endpoint() {
    let o = levyheat(&["interpolation", "--r", "1", "--s", "2", "--out", "unused"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("open endpoint"), "{}", stderr(&o));
    assert!(!Path::new("unused").exists());
}

#[test]
fn nonlinear_decay_range_is_checked() {
    let o = levyheat(&["decay-fit", "--sigma", "3", "--q", "1.5", "--p", "4", "--near", "bounded:c0=1", "--tail", "compact"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sigma - 1 < q < p"), "{}", stderr(&o));
}

#[test]
fn run_is_byte_reproducible_and_seed_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("r.cfg");
    std::fs::write(
        &cfg,
        r#"name = "rep"
[kernel]
dim = 1
near = { type = "bounded", c0 = 1.0 }
tail = { type = "compact" }
[grid]
half_width = 8.0
n = 128
[flow]
type = "linear"
[initial]
type = "random"
band = 6
seed = 1
[snapshots]
type = "list"
times = [0.0, 1.0]
[output]
dir = "a"
"#,
    )
    .unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let o = levyheat(&["--seed", "9", "run", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["norms.csv", "symbol.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
    }
    assert!(std::fs::read_to_string(a.join("manifest.txt")).unwrap().contains("seed = 9"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_levyheat"))
        .args(["verify", "--only", "1"])
        .env("LEVYHEAT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_single_criterion() {
    let o = levyheat(&["verify", "--only", "1"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("[PASS]"));
}
