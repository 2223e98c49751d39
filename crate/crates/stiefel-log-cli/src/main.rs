use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use stiefel_log_cli::{emit, run_experiment, ExperimentConfig, ExperimentRow, OutputFormat};

/// Benchmark harness for the Stiefel-manifold geodesic log solver:
/// sweeps planted endpoint problems over (n, p) grids and reports mean
/// iteration counts, wall times, convergence rates and distance errors.
#[derive(Parser, Debug)]
#[command(name = "stiefel-bench", version, about)]
struct Cli {
    /// Ambient dimensions to sweep (comma-separated).
    #[arg(long = "n", value_delimiter = ',', default_value = "100")]
    n: Vec<usize>,

    /// Column counts to sweep (comma-separated).
    #[arg(long = "p", value_delimiter = ',', default_value = "2")]
    p: Vec<usize>,

    /// Prescribed geodesic distance of the planted pairs.
    #[arg(long, default_value_t = 0.5 * std::f64::consts::PI)]
    distance: f64,

    /// Stopping tolerance on the Newton update norm.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,

    /// Iteration cap per solve.
    #[arg(long = "max-iter", default_value_t = 100)]
    max_iter: usize,

    /// Number of seeded trials per (n, p) cell.
    #[arg(long, default_value_t = 10)]
    trials: usize,

    /// Master seed; trial i uses an independent stream derived from
    /// (seed, i).
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Use the reduced St(2p,p) formulation when p < n/2 (default).
    #[arg(long, overrides_with = "no_small")]
    small: bool,

    /// Always solve in the full formulation.
    #[arg(long, overrides_with = "small")]
    no_small: bool,

    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,

    /// Write the report to this file instead of standard output.
    #[arg(long = "out", value_name = "PATH")]
    out: Option<PathBuf>,

    /// Run the trials of each cell in parallel.
    #[arg(long)]
    parallel: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Table,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Table => OutputFormat::Table,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = ExperimentConfig {
        n_values: cli.n,
        p_values: cli.p,
        prescribed_distance: cli.distance,
        tol: cli.tol,
        max_iter: cli.max_iter,
        trials: cli.trials,
        seed: cli.seed,
        use_small_formulation: !cli.no_small,
        output_format: cli.format.into(),
        output_path: cli.out,
        parallel_trials: cli.parallel,
    };

    let outcomes = match run_experiment(&config) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };

    let mut rows: Vec<ExperimentRow> = Vec::new();
    let mut had_cell_error = false;
    for outcome in &outcomes {
        match &outcome.result {
            Ok(row) => rows.push(row.clone()),
            Err(msg) => {
                eprintln!("error in cell (n={}, p={}): {msg}", outcome.n, outcome.p);
                had_cell_error = true;
            }
        }
    }

    if !rows.is_empty() {
        if let Err(e) = emit(&rows, config.output_format, config.output_path.as_deref()) {
            eprintln!("error: failed to write report: {e}");
            return ExitCode::from(1);
        }
    }

    if had_cell_error {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
