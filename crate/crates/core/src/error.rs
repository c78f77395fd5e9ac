use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(ValidationReport),

    #[error("invalid information structure: {0}")]
    InvalidInformationStructure(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("scenario file: {0}")]
    Parse(String),

    /// Thresholds requested for a scenario whose optimum is to stay silent.
    #[error("persuasion thresholds undefined: p = {p} does not exceed p_bar = {p_bar}")]
    NoPersuasionRegime { p: f64, p_bar: f64 },

    #[error("flows admit no feasible strategy decomposition: {0}")]
    Infeasible(String),

    #[error("dynamics did not converge after {iterations} iterations (last gap {last_gap:e})")]
    NonConvergence { iterations: usize, last_gap: f64 },

    #[error("numerical inconsistency: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
