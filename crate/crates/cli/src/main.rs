use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use infodesign::GridSpec;
use infodesign_cli::commands::{self, Format};
use infodesign_cli::sweep::{Axis, Output, SweepRequest};
use infodesign_cli::{load_scenario, CliError};

/// Equilibria and optimal information design on a two-route network.
#[derive(Parser, Debug)]
#[command(name = "infodesign", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a scenario file; exit 1 if any invariant is violated.
    Validate { config: PathBuf },
    /// Solve the equilibrium induced by a given information structure.
    Equilibrium {
        config: PathBuf,
        #[arg(long = "pi-aa")]
        pi_aa: f64,
        #[arg(long = "pi-nn")]
        pi_nn: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Solve for the spillover-minimizing information structure.
    Design {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Sweep one parameter and tabulate the optimal design as CSV.
    Sweep {
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: Axis,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long)]
        count: usize,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Output::PiStar, Output::Flows, Output::Loss, Output::Costs])]
        outputs: Vec<Output>,
        /// Output CSV path; a `.meta.json` sidecar is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force the design problem on a grid and compare with the closed form.
    Oracle {
        config: PathBuf,
        /// Grid points per probability axis.
        #[arg(long, default_value_t = 201)]
        grid: usize,
        /// Dynamics restarts per grid cell.
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write every evaluated cell to this CSV file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Validate { config } => {
            let s = load_scenario(&config)?;
            let ok = commands::validate(&s, &mut stdout)?;
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Equilibrium {
            config,
            pi_aa,
            pi_nn,
            format,
        } => commands::equilibrium(load_scenario(&config)?, pi_aa, pi_nn, format, &mut stdout)?,
        Command::Design { config, format } => commands::design(load_scenario(&config)?, format, &mut stdout)?,
        Command::Sweep {
            config,
            axis,
            start,
            stop,
            count,
            outputs,
            out,
        } => {
            let req = SweepRequest {
                scenario: load_scenario(&config)?,
                axis,
                start,
                stop,
                count,
                outputs: outputs.into_iter().collect(),
            };
            commands::sweep(&req, &config, out.as_deref(), &mut stdout)?
        }
        Command::Oracle {
            config,
            grid,
            restarts,
            tol,
            seed,
            trace,
        } => {
            let spec = GridSpec {
                steps_pi: grid,
                steps_flow: restarts,
                tol,
                seed,
            };
            commands::oracle(load_scenario(&config)?, &spec, trace.as_deref(), &mut stdout)?
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
