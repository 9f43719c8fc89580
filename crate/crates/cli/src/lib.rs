//! Command-line front end for `sparse_ctrb`: system files, subcommands and
//! JSON reports.
//!
//! Exit codes: 0 when the analysis completed (whatever the verdict), 2 on
//! input errors, 3 when a search ran out of budget.

pub mod commands;
pub mod report;
pub mod system_file;

use std::fmt;
use std::process::ExitCode;

use sparse_ctrb::Tolerance;

pub use commands::{run, Outcome};
pub use report::SCHEMA_VERSION;
pub use system_file::SystemFile;

/// Environment variable holding a default for `--tol`.
pub const TOL_ENV: &str = "SPARSE_CTRB_TOL";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliError {
    Input(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

impl From<sparse_ctrb::Error> for CliError {
    fn from(e: sparse_ctrb::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Complete,
    InputError,
    Inconclusive,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Complete => 0,
            Status::InputError => 2,
            Status::Inconclusive => 3,
        }
    }
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s.code())
    }
}

/// Parses `RANK_REL` or `RANK_REL,EIG_CLUSTER,RESIDUAL_ABS`.
pub fn parse_tolerance(text: &str) -> Result<Tolerance, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let nums = parts
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|_| CliError::Input(format!("invalid tolerance {text:?}")))?;
    let def = Tolerance::default();
    let tol = match nums.as_slice() {
        [rank] => Tolerance::new(*rank, def.eig_cluster, def.residual_abs),
        [rank, eig, res] => Tolerance::new(*rank, *eig, *res),
        _ => {
            return Err(CliError::Input(format!(
                "tolerance takes one or three comma-separated values, got {text:?}"
            )))
        }
    };
    tol.map_err(CliError::from)
}
