use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use volex_core::analysis::{self, RunOptions};
use volex_core::report::Report;
use volex_core::scenario::{load_scenario, Analysis};
use volex_core::{Error, ErrorClass};

#[derive(Parser)]
#[command(name = "volex", version, about = "Check volumetric-expansion identities on scenario files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a scenario without running analyses.
    Validate { file: PathBuf },
    /// Run analyses on a scenario.
    Run {
        file: PathBuf,
        /// Analyses to run; defaults to the scenario's own list.
        #[arg(long, value_enum)]
        analysis: Vec<Analysis>,
        /// Nodes per coordinate, overriding the scenario grid.
        #[arg(long)]
        grid: Option<usize>,
        /// Tolerance for the primary checks, overriding the defaults.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the per-sample CSV table here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Worker threads for grid evaluation (results do not depend on it).
        #[arg(long)]
        threads: Option<usize>,
    },
}

const EXIT_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(match e.class() {
        ErrorClass::Input => EXIT_INPUT,
        ErrorClass::Numerical => EXIT_NUMERICAL,
    })
}

fn summarize(report: &Report) {
    for a in &report.analyses {
        println!("{} {}", if a.passed { "PASS" } else { "FAIL" }, a.analysis);
        for e in &a.entries {
            match (e.tolerance, e.passed) {
                (Some(t), Some(p)) => {
                    println!("  {:<36} {:>14.6e}  tol {:.1e}  {}", e.name, e.value, t, if p { "ok" } else { "FAILED" })
                }
                _ => println!("  {:<36} {:>14.6e}", e.name, e.value),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { file } => match load_scenario(&file) {
            Ok(s) => {
                println!(
                    "{}: valid ({} coordinates, {}, {} analyses)",
                    s.name,
                    s.dim(),
                    s.chart().signature(),
                    s.analyses.len()
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Run { file, analysis, grid, tol, out, csv, threads } => {
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_INPUT);
                }
            }
            if tol.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
                eprintln!("error: --tol must be a nonnegative number");
                return ExitCode::from(EXIT_INPUT);
            }
            let scenario = match load_scenario(&file) {
                Ok(s) => s,
                Err(e) => return fail(&e),
            };
            let report = match analysis::run(&scenario, &analysis, &RunOptions { grid, tol }) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            summarize(&report);
            let written = out
                .map(|p| report.write_json(&p))
                .transpose()
                .and_then(|_| csv.map(|p| report.write_csv_file(&p)).transpose());
            if let Err(e) = written {
                return fail(&e);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
    }
}
