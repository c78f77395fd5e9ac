//! Front-end plumbing for the `infodesign` binary: scenario loading,
//! command implementations and parameter sweeps.

pub mod commands;
pub mod sweep;

use std::fmt;
use std::path::Path;

use infodesign::NetworkScenario;

/// A command failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// The scenario or request is well-formed but not solvable (exit 1).
    Domain(String),
    /// Unreadable file, malformed document or bad arguments (exit 2).
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(m) | CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<infodesign::Error> for CliError {
    fn from(e: infodesign::Error) -> Self {
        match e {
            infodesign::Error::Parse(m) => CliError::Usage(m),
            other => CliError::Domain(other.to_string()),
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<NetworkScenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    NetworkScenario::from_toml_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
