//! Golden-file checks: every CLI experiment runs with its frozen seed and is
//! checked for shape plus, where the value is a stable regression constant,
//! the numbers themselves (tolerance 1e-9 relative, which leaves room for
//! libm differences across platforms).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_illposed")
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("illposed-golden-{}-{tag}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        TempDir(dir)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        std::fs::remove_dir_all(&self.0).ok();
    }
}

fn run_cli(dir: &TempDir, args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .current_dir(&dir.0)
        .output()
        .expect("binary runs")
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    let body = std::fs::read_to_string(path).unwrap();
    body.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1) // header
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn close(value: &str, expected: f64) -> bool {
    let v: f64 = value.parse().unwrap();
    (v - expected).abs() <= 1e-9 * expected.abs().max(1e-300)
}

#[test]
fn demo_table1_golden() {
    let dir = TempDir::new("demo");
    let out = run_cli(&dir, &["demo-table1", "--n", "4,8,16,32", "--out", "demo.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&dir.path("demo.csv"));
    assert_eq!(rows.len(), 4, "four column groups as in the published table");
    // frozen: the n = 4 solve is well-enough conditioned to be a constant
    assert_eq!(rows[0][0], "4");
    assert!(close(&rows[0][3], 2.2701438063418256e-1)); // error at t = 1/2
    assert!(close(&rows[0][6], 2.2701438063418256e-1)); // max error
    assert!(close(&rows[0][7], 3.5135208197398810e5)); // condition
    // n = 32 blows up and the matrix is numerically singular
    let max_err_32: f64 = rows[3][6].parse().unwrap();
    assert!(max_err_32 > 1.0);
    assert_eq!(rows[3][7], "inf");
}

#[test]
fn compare_table2_golden() {
    let dir = TempDir::new("table2");
    let out = run_cli(&dir, &["compare-table2", "--out", "t2.csv"]);
    assert!(out.status.success());
    let rows = data_rows(&dir.path("t2.csv"));
    assert_eq!(rows.len(), 4);
    // frozen values for the default configuration at seed 42
    assert!(close(&rows[0][1], 1.0909429059748366e-1));
    assert!(close(&rows[0][2], 8.2267025830952675e-2));
    assert!(close(&rows[0][3], 1.7537477905449414e-1));
    assert!(close(&rows[2][3], 3.6410319772685797e0));
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("min fractional-weighted error"), "{summary}");
}

#[test]
fn compare_table2_optimized_variant() {
    let dir = TempDir::new("table2opt");
    let out = run_cli(&dir, &[
        "compare-table2", "--optimize-alpha", "true", "--n", "8", "--m", "10", "--out", "opt.csv",
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(dir.path("opt.csv")).unwrap();
    assert!(body.contains("# alpha minimized per delta"));
    assert_eq!(data_rows(&dir.path("opt.csv")).len(), 4);
}

#[test]
fn sweep_alpha_golden() {
    let dir = TempDir::new("sweep");
    let out = run_cli(&dir, &["sweep-alpha", "--n", "16", "--delta", "1e-3", "--out", "s.csv"]);
    assert!(out.status.success());
    let rows = data_rows(&dir.path("s.csv"));
    assert_eq!(rows.len(), 10);
    assert!(close(&rows[1][1], 1.0094295758221211e-1)); // error at alpha = 1e-2
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("min error"), "{summary}");
}

#[test]
fn sweep_iterations_shape() {
    let dir = TempDir::new("iters");
    let out = run_cli(&dir, &["sweep-iterations", "--n", "16", "--m", "30", "--out", "i.csv"]);
    assert!(out.status.success());
    let rows = data_rows(&dir.path("i.csv"));
    assert_eq!(rows.len(), 90, "three methods, thirty steps each");
    for method in ["iterated-tikhonov", "landweber", "iterated-fractional-weighted"] {
        assert!(rows.iter().any(|r| r[4].contains(method)));
    }
}

#[test]
fn lcurve_shape_and_monotonicity() {
    let dir = TempDir::new("lcurve");
    let out = run_cli(&dir, &["lcurve", "--n", "16", "--out", "l.csv"]);
    assert!(out.status.success());
    let rows = data_rows(&dir.path("l.csv"));
    assert_eq!(rows.len(), 40, "ten alphas for each of four deltas");
    // within each delta block the residual norm is non-increasing
    for block in rows.chunks(10) {
        for pair in block.windows(2) {
            let r0: f64 = pair[0][2].parse().unwrap();
            let r1: f64 = pair[1][2].parse().unwrap();
            assert!(r1 <= r0 * (1.0 + 1e-12));
        }
    }
}

#[test]
fn rate_reports_slope() {
    let dir = TempDir::new("rate");
    let out = run_cli(&dir, &["rate", "--n", "32", "--out", "r.csv"]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(dir.path("r.csv")).unwrap();
    let slope_line = body.lines().find(|l| l.starts_with("# slope=")).expect("slope comment");
    let slope: f64 = slope_line.trim_start_matches("# slope=").parse().unwrap();
    assert!(slope > 0.3 && slope < 1.0, "slope {slope}");
    assert_eq!(data_rows(&dir.path("r.csv")).len(), 5);
}

#[test]
fn check_filters_report() {
    let dir = TempDir::new("filters");
    let out = run_cli(&dir, &["check-filters", "--out", "f.csv"]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(dir.path("f.csv")).unwrap();
    assert!(body.contains("# q_bound="));
    assert!(body.contains("# gamma_fit="));
    assert!(body.contains("# limit_check=true"));
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("gamma_fit"), "{summary}");
}

#[test]
fn unknown_flag_exits_2_without_writing() {
    let dir = TempDir::new("badflag");
    let out = run_cli(&dir, &["sweep-alpha", "--bogus", "1", "--out", "never.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path("never.csv").exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown flag"));
}

#[test]
fn invalid_r_exits_2_with_field_name() {
    let dir = TempDir::new("badr");
    let out = run_cli(&dir, &["sweep-alpha", "--r", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("r:"), "{stderr}");
}

#[test]
fn multiple_validation_errors_reported_together() {
    let dir = TempDir::new("multi");
    let out = run_cli(&dir, &["sweep-alpha", "--r", "0.1", "--alpha", "-2", "--m", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.lines().count() >= 3, "{stderr}");
}

#[test]
fn json_output_is_valid() {
    let dir = TempDir::new("json");
    let out = run_cli(&dir, &[
        "compare-table2", "--n", "8", "--m", "5", "--format", "json", "--out", "t.json",
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(dir.path("t.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(doc["seed"], 42);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4);
}
