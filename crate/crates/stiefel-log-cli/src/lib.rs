//! Experiment harness behind the `stiefel-bench` binary: seeded sweeps
//! over (n, p) with planted-distance endpoint pairs, per-cell
//! aggregation of iteration counts, wall times, convergence rates and
//! distance errors, and CSV/table reporting.

use rayon::prelude::*;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use stiefel_log::probgen::{pair_with_distance, GeneratorSpec};
use stiefel_log::solver::{solve_log, NormChoice, SolverOptions};

/// Exact CSV header emitted (and required when parsing back).
pub const CSV_HEADER: &str =
    "n,p,distance,tol,trials,mean_iterations,mean_time_s,convergence_rate,mean_abs_distance_error";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Table,
}

/// Full sweep configuration; one experiment row is produced per element
/// of the cartesian product n_values × p_values.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub p_values: Vec<usize>,
    pub prescribed_distance: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub trials: usize,
    pub seed: u64,
    pub use_small_formulation: bool,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub parallel_trials: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_values: vec![100],
            p_values: vec![2],
            prescribed_distance: 0.5 * std::f64::consts::PI,
            tol: 1e-5,
            max_iter: 100,
            trials: 10,
            seed: 0,
            use_small_formulation: true,
            output_format: OutputFormat::Table,
            output_path: None,
            parallel_trials: false,
        }
    }
}

/// Aggregated results of one (n, p) sweep cell. `mean_iterations` and
/// `mean_abs_distance_error` average over converged trials only (NaN if
/// none converged); `mean_time_s` averages the solver wall time over all
/// trials; `convergence_rate` = converged / trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub p: usize,
    pub prescribed_distance: f64,
    pub tol: f64,
    pub trials: usize,
    pub mean_iterations: f64,
    pub mean_time_s: f64,
    pub convergence_rate: f64,
    pub mean_abs_distance_error: f64,
}

/// One sweep cell's outcome: the row, or a per-cell configuration error
/// (which does not abort the rest of the sweep).
#[derive(Debug, Clone)]
pub struct RowOutcome {
    pub n: usize,
    pub p: usize,
    pub result: Result<ExperimentRow, String>,
}

fn validate_config(config: &ExperimentConfig) -> Result<(), String> {
    if config.n_values.is_empty() || config.p_values.is_empty() {
        return Err("sweep lists --n and --p must be nonempty".to_string());
    }
    if config.trials < 1 {
        return Err("--trials must be at least 1".to_string());
    }
    if !(config.tol > 0.0) || !config.tol.is_finite() {
        return Err(format!("--tol must be positive and finite, got {}", config.tol));
    }
    if config.max_iter < 1 {
        return Err("--max-iter must be at least 1".to_string());
    }
    if !(config.prescribed_distance >= 0.0) || !config.prescribed_distance.is_finite() {
        return Err(format!(
            "--distance must be nonnegative and finite, got {}",
            config.prescribed_distance
        ));
    }
    Ok(())
}

/// Runs one sweep cell: `trials` planted pairs on St(n,p) at the
/// prescribed distance, each solved once. Wall time is taken from the
/// solver's own report, so pair generation is excluded.
fn run_cell(n: usize, p: usize, config: &ExperimentConfig) -> Result<ExperimentRow, String> {
    if p < 1 || p > n {
        return Err(format!("invalid cell: need 1 <= p <= n, got n={n}, p={p}"));
    }
    let spec = GeneratorSpec {
        n,
        p,
        seed: config.seed,
        trials: config.trials,
    };
    let options = SolverOptions {
        tol: config.tol,
        max_iter: config.max_iter,
        use_small_formulation: config.use_small_formulation,
        norm_choice: NormChoice::Frobenius,
    };
    let run_trial = |i: u64| -> Result<(bool, usize, f64, f64), String> {
        let pair = pair_with_distance(&spec, i, config.prescribed_distance, options)
            .map_err(|e| format!("trial {i}: generation failed: {e}"))?;
        let report =
            solve_log(&pair.problem).map_err(|e| format!("trial {i}: solve failed: {e}"))?;
        Ok((
            report.converged,
            report.iterations,
            report.wall_time.as_secs_f64(),
            (report.distance - pair.planted_norm).abs(),
        ))
    };
    let outcomes: Vec<Result<(bool, usize, f64, f64), String>> = if config.parallel_trials {
        (0..config.trials as u64)
            .into_par_iter()
            .map(run_trial)
            .collect()
    } else {
        (0..config.trials as u64).map(run_trial).collect()
    };

    let mut converged = 0usize;
    let mut iter_sum = 0.0;
    let mut time_sum = 0.0;
    let mut err_sum = 0.0;
    for outcome in outcomes {
        let (ok, iterations, time_s, abs_err) = outcome?;
        time_sum += time_s;
        if ok {
            converged += 1;
            iter_sum += iterations as f64;
            err_sum += abs_err;
        }
    }
    let trials = config.trials;
    let (mean_iterations, mean_abs_distance_error) = if converged > 0 {
        (iter_sum / converged as f64, err_sum / converged as f64)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(ExperimentRow {
        n,
        p,
        prescribed_distance: config.prescribed_distance,
        tol: config.tol,
        trials,
        mean_iterations,
        mean_time_s: time_sum / trials as f64,
        convergence_rate: converged as f64 / trials as f64,
        mean_abs_distance_error,
    })
}

/// Runs the full sweep. Per-cell failures (e.g. p > n for one
/// combination) are recorded in the corresponding outcome and do not
/// abort the remaining cells; configuration errors that invalidate the
/// whole sweep are returned as Err.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RowOutcome>, String> {
    validate_config(config)?;
    let mut outcomes = Vec::new();
    for &n in &config.n_values {
        for &p in &config.p_values {
            outcomes.push(RowOutcome {
                n,
                p,
                result: run_cell(n, p, config),
            });
        }
    }
    Ok(outcomes)
}

/// Serializes rows as CSV: the exact header above, one line per row,
/// decimal point '.', LF line endings, full round-trip float precision.
pub fn to_csv(rows: &[ExperimentRow]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.p,
            r.prescribed_distance,
            r.tol,
            r.trials,
            r.mean_iterations,
            r.mean_time_s,
            r.convergence_rate,
            r.mean_abs_distance_error
        )
        .expect("writing to a String cannot fail");
    }
    s
}

/// Parses CSV produced by `to_csv` back into rows (used by tests and
/// downstream tooling).
pub fn from_csv(text: &str) -> Result<Vec<ExperimentRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        Some(h) => return Err(format!("unexpected header: {h}")),
        None => return Err("empty input".to_string()),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(format!("line {}: expected 9 fields, got {}", idx + 2, fields.len()));
        }
        let parse_f = |s: &str| -> Result<f64, String> {
            s.parse::<f64>().map_err(|e| format!("line {}: {e}", idx + 2))
        };
        let parse_u = |s: &str| -> Result<usize, String> {
            s.parse::<usize>().map_err(|e| format!("line {}: {e}", idx + 2))
        };
        rows.push(ExperimentRow {
            n: parse_u(fields[0])?,
            p: parse_u(fields[1])?,
            prescribed_distance: parse_f(fields[2])?,
            tol: parse_f(fields[3])?,
            trials: parse_u(fields[4])?,
            mean_iterations: parse_f(fields[5])?,
            mean_time_s: parse_f(fields[6])?,
            convergence_rate: parse_f(fields[7])?,
            mean_abs_distance_error: parse_f(fields[8])?,
        });
    }
    Ok(rows)
}

/// Renders rows as a human-readable aligned table.
pub fn to_table(rows: &[ExperimentRow]) -> String {
    let headers = [
        "n",
        "p",
        "distance",
        "tol",
        "trials",
        "mean_iter",
        "mean_time_s",
        "conv_rate",
        "mean_abs_err",
    ];
    let mut cells: Vec<[String; 9]> = Vec::with_capacity(rows.len());
    for r in rows {
        cells.push([
            r.n.to_string(),
            r.p.to_string(),
            format!("{:.6}", r.prescribed_distance),
            format!("{:.1e}", r.tol),
            r.trials.to_string(),
            format!("{:.2}", r.mean_iterations),
            format!("{:.6}", r.mean_time_s),
            format!("{:.3}", r.convergence_rate),
            format!("{:.3e}", r.mean_abs_distance_error),
        ]);
    }
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in &cells {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for (i, h) in headers.iter().enumerate() {
        if i > 0 {
            out.push_str("  ");
        }
        let _ = write!(out, "{:>width$}", h, width = widths[i]);
    }
    out.push('\n');
    for row in &cells {
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            let _ = write!(out, "{:>width$}", cell, width = widths[i]);
        }
        out.push('\n');
    }
    out
}

/// Writes the report to `path`, or to standard output when no path is
/// given.
pub fn emit(
    rows: &[ExperimentRow],
    format: OutputFormat,
    path: Option<&Path>,
) -> io::Result<()> {
    let payload = match format {
        OutputFormat::Csv => to_csv(rows),
        OutputFormat::Table => to_table(rows),
    };
    match path {
        Some(p) => fs::write(p, payload),
        None => io::stdout().write_all(payload.as_bytes()),
    }
}
