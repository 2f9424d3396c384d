use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

mod input;
mod run;

use run::{run, Command, RunConfig};

/// Evaluate, verify and classify one-dimensional geometric field theories.
#[derive(Debug, Parser)]
#[command(name = "tftlab", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// Description files (repeatable; `glue` takes two).
    #[arg(long = "input", num_args = 1.., value_name = "PATH")]
    inputs: Vec<PathBuf>,

    /// Tolerance override: integrator rtol for transport/holonomy, the pass
    /// bound for classify and glue, the compatibility bound for evaluate.
    #[arg(long)]
    tol: Option<f64>,

    /// Family grid size for evaluate/glue, Chebyshev degree for classify.
    #[arg(long)]
    grid: Option<usize>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Also write the report here.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,

    /// Use the oriented functor (no bilinear form).
    #[arg(long)]
    oriented: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = RunConfig {
        inputs: args.inputs,
        tol: args.tol,
        grid: args.grid,
        seed: args.seed,
        report: args.report,
        oriented: args.oriented,
        ..RunConfig::new(args.command)
    };
    match run(&cfg) {
        Ok(report) => {
            let text = report.to_string();
            print!("{text}");
            if let Some(path) = &cfg.report {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("input error: cannot write report {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if let Some(f) = &report.failure {
                eprintln!("verification failed: {f}");
            }
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
