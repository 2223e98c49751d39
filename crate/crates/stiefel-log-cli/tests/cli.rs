//! End-to-end tests of the `stiefel-bench` binary: flag parsing, exit
//! codes, and the CSV contract, exercised through a real process.

use std::process::{Command, Output};
use stiefel_log_cli::{from_csv, CSV_HEADER};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stiefel-bench"))
        .args(args)
        .output()
        .expect("failed to spawn stiefel-bench")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is not UTF-8")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is not UTF-8")
}

#[test]
fn successful_sweep_exits_zero_with_csv_header() {
    let out = run(&[
        "--n", "12,16", "--p", "2", "--trials", "2", "--tol", "1e-5", "--format", "csv",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), 2, "one data row per (n, p) cell");
}

#[test]
fn infeasible_cell_exits_two() {
    let out = run(&["--n", "3", "--p", "5", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_str(&out);
    assert!(
        err.contains("n=3") && err.contains("p=5"),
        "stderr should name the failing cell, got: {err}"
    );
    assert!(stdout_str(&out).is_empty(), "no rows to report");
}

#[test]
fn mixed_sweep_reports_good_rows_and_exits_two() {
    // p = 4 is valid for n = 10 but not for n = 3: the good cells must
    // still be reported even though the sweep as a whole fails.
    let out = run(&[
        "--n", "3,10", "--p", "4", "--trials", "2", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let rows = from_csv(&stdout_str(&out)).expect("valid CSV on stdout");
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].n, rows[0].p), (10, 4));
    assert!(stderr_str(&out).contains("n=3"));
}

#[test]
fn unwritable_out_path_exits_one() {
    let out = run(&[
        "--n", "8", "--p", "2", "--trials", "1",
        "--out", "/nonexistent-dir-for-test/report.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("failed to write report"));
}

#[test]
fn out_flag_writes_file_and_leaves_stdout_empty() {
    let dir = std::env::temp_dir().join("stiefel-bench-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.csv");
    let out = run(&[
        "--n", "10", "--p", "2", "--trials", "2", "--format", "csv",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    assert!(stdout_str(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows = from_csv(&text).expect("file holds valid CSV");
    assert_eq!(rows.len(), 1);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn zero_distance_row_is_trivial() {
    let out = run(&[
        "--n", "10", "--p", "3", "--distance", "0", "--trials", "3", "--format", "csv",
    ]);
    assert!(out.status.success());
    let rows = from_csv(&stdout_str(&out)).expect("valid CSV");
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(row.mean_iterations, 0.0);
    assert_eq!(row.convergence_rate, 1.0);
    assert!(row.mean_abs_distance_error <= 1e-14);
}

#[test]
fn csv_round_trips_through_binary() {
    let out = run(&[
        "--n", "14", "--p", "2,3", "--trials", "3", "--tol", "1e-6",
        "--seed", "7", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let rows = from_csv(&text).expect("valid CSV");
    assert_eq!(rows.len(), 2);
    for row in &rows {
        assert_eq!(row.n, 14);
        assert_eq!(row.trials, 3);
        assert_eq!(row.tol, 1e-6);
        assert!((row.prescribed_distance - 0.5 * std::f64::consts::PI).abs() < 1e-15);
        assert!(row.convergence_rate > 0.0);
    }
}

#[test]
fn runs_are_deterministic_up_to_timing() {
    let args = [
        "--n", "12", "--p", "2", "--trials", "4", "--seed", "42", "--format", "csv",
    ];
    let a = from_csv(&stdout_str(&run(&args))).unwrap();
    let b = from_csv(&stdout_str(&run(&args))).unwrap();
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(&b) {
        assert_eq!(ra.n, rb.n);
        assert_eq!(ra.p, rb.p);
        assert_eq!(ra.mean_iterations, rb.mean_iterations);
        assert_eq!(ra.convergence_rate, rb.convergence_rate);
        assert_eq!(ra.mean_abs_distance_error, rb.mean_abs_distance_error);
    }
}

#[test]
fn parallel_flag_matches_serial_results() {
    let base = [
        "--n", "16", "--p", "3", "--trials", "4", "--seed", "5", "--format", "csv",
    ];
    let serial = from_csv(&stdout_str(&run(&base))).unwrap();
    let mut with_parallel: Vec<&str> = base.to_vec();
    with_parallel.push("--parallel");
    let parallel = from_csv(&stdout_str(&run(&with_parallel))).unwrap();
    assert_eq!(serial.len(), parallel.len());
    for (rs, rp) in serial.iter().zip(&parallel) {
        assert_eq!(rs.mean_iterations, rp.mean_iterations);
        assert_eq!(rs.mean_abs_distance_error, rp.mean_abs_distance_error);
        assert_eq!(rs.convergence_rate, rp.convergence_rate);
    }
}

#[test]
fn small_and_no_small_flags_agree_on_results() {
    let base = [
        "--n", "30", "--p", "3", "--trials", "3", "--tol", "1e-8",
        "--seed", "11", "--format", "csv",
    ];
    let mut small_args: Vec<&str> = base.to_vec();
    small_args.push("--small");
    let mut full_args: Vec<&str> = base.to_vec();
    full_args.push("--no-small");
    let small = from_csv(&stdout_str(&run(&small_args))).unwrap();
    let full = from_csv(&stdout_str(&run(&full_args))).unwrap();
    assert_eq!(small.len(), 1);
    assert_eq!(full.len(), 1);
    // The two formulations run the same Newton iteration in different
    // coordinates; iteration counts and convergence must coincide, and
    // the recovered distances agree far below the tolerance.
    assert_eq!(small[0].mean_iterations, full[0].mean_iterations);
    assert_eq!(small[0].convergence_rate, full[0].convergence_rate);
    assert!((small[0].mean_abs_distance_error - full[0].mean_abs_distance_error).abs() <= 1e-10);
}

#[test]
fn rejects_invalid_configuration() {
    let out = run(&["--n", "10", "--p", "2", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).contains("error"));
}

#[test]
fn table_format_prints_header_row() {
    let out = run(&["--n", "10", "--p", "2", "--trials", "1"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.contains("mean_iter"));
    assert!(text.contains("conv_rate"));
}
