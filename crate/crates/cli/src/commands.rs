use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;
use infodesign::record::round_sig;
use infodesign::{
    grid_search_design, grid_search_trace, optimal_design, solve_equilibrium, DesignRecord, GridSpec,
    InformationStructure, NetworkScenario, OutcomeRecord, ValidScenario,
};
use serde::Serialize;

use crate::sweep::{run_sweep, write_csv, SweepRequest};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn emit<R: Serialize, W: Write>(record: &R, format: Format, out: &mut W) -> Result<(), CliError> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, record).map_err(io_err)?;
            writeln!(out).map_err(io_err)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.serialize(record).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
    }
}

fn require_valid(s: NetworkScenario) -> Result<ValidScenario, CliError> {
    let report = s.validate();
    if report.is_empty() {
        Ok(s.into_valid()?)
    } else {
        Err(CliError::Domain(format!("invalid scenario: {report}")))
    }
}

/// Prints the validation report; `Ok(false)` when the scenario is invalid.
pub fn validate<W: Write>(s: &NetworkScenario, out: &mut W) -> Result<bool, CliError> {
    let report = s.validate();
    if report.is_empty() {
        writeln!(out, "ok").map_err(io_err)?;
    } else {
        for msg in report.messages() {
            writeln!(out, "violation: {msg}").map_err(io_err)?;
        }
    }
    Ok(report.is_empty())
}

pub fn equilibrium<W: Write>(
    s: NetworkScenario,
    pi_aa: f64,
    pi_nn: f64,
    format: Format,
    out: &mut W,
) -> Result<(), CliError> {
    let s = require_valid(s)?;
    let pi = InformationStructure::new(pi_aa, pi_nn)?;
    let outcome = solve_equilibrium(&s, &pi)?;
    emit(&OutcomeRecord::new(&s, &outcome), format, out)
}

pub fn design<W: Write>(s: NetworkScenario, format: Format, out: &mut W) -> Result<(), CliError> {
    let s = require_valid(s)?;
    let sol = optimal_design(&s)?;
    emit(&DesignRecord::from(&sol), format, out)
}

#[derive(Debug, Serialize)]
struct SweepMetadata<'a> {
    generator: &'static str,
    version: &'static str,
    config: &'a str,
    request: &'a SweepRequest,
}

/// Writes the sweep table to `out_path` (or `stdout` when absent) and a
/// `<out>.meta.json` sidecar describing the request.
pub fn sweep<W: Write>(
    req: &SweepRequest,
    config: &Path,
    out_path: Option<&Path>,
    stdout: &mut W,
) -> Result<(), CliError> {
    req.check().map_err(CliError::Usage)?;
    let table = run_sweep(req);
    match out_path {
        None => write_csv(&table, stdout).map_err(io_err),
        Some(path) => {
            let write = || -> anyhow::Result<()> {
                let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
                write_csv(&table, BufWriter::new(file))?;
                let mut meta_path = path.as_os_str().to_owned();
                meta_path.push(".meta.json");
                let meta = SweepMetadata {
                    generator: env!("CARGO_PKG_NAME"),
                    version: env!("CARGO_PKG_VERSION"),
                    config: &config.display().to_string(),
                    request: req,
                };
                let mut f = BufWriter::new(File::create(&meta_path)?);
                serde_json::to_writer_pretty(&mut f, &meta)?;
                writeln!(f)?;
                Ok(())
            };
            write().map_err(io_err)
        }
    }
}

#[derive(Debug, Serialize)]
struct OracleReport {
    grid: usize,
    cells: usize,
    best_pi_a_a: f64,
    best_pi_n_n: f64,
    best_loss: f64,
    closed_form_regime: infodesign::Regime,
    closed_form_pi_a_a: f64,
    closed_form_loss: f64,
    /// Grid minimum minus the closed-form optimum.
    excess: f64,
}

pub fn oracle<W: Write>(
    s: NetworkScenario,
    spec: &GridSpec,
    trace: Option<&Path>,
    out: &mut W,
) -> Result<(), CliError> {
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let s = require_valid(s)?;
    let result = match trace {
        None => grid_search_design(&s, spec)?,
        Some(path) => {
            let (result, cells) = grid_search_trace(&s, spec)?;
            let file = File::create(path).map_err(io_err)?;
            let mut w = csv::Writer::from_writer(BufWriter::new(file));
            w.write_record(["pi_a_a", "pi_n_n", "g_value", "f2_n", "f2_a", "loss"])
                .map_err(io_err)?;
            for c in cells {
                w.write_record(
                    [c.pi_a_a, c.pi_n_n, c.g_value, c.f2_n, c.f2_a, c.loss].map(|x| round_sig(x).to_string()),
                )
                .map_err(io_err)?;
            }
            w.flush().map_err(io_err)?;
            result
        }
    };
    let sol = optimal_design(&s)?;
    let report = OracleReport {
        grid: spec.steps_pi,
        cells: result.cells_evaluated,
        best_pi_a_a: round_sig(result.best_pi.pi_a_given_a),
        best_pi_n_n: round_sig(result.best_pi.pi_n_given_n),
        best_loss: round_sig(result.best_loss),
        closed_form_regime: sol.regime,
        closed_form_pi_a_a: round_sig(sol.pi_star.pi_a_given_a),
        closed_form_loss: round_sig(sol.loss),
        excess: round_sig(result.best_loss - sol.loss),
    };
    emit(&report, Format::Json, out)
}
