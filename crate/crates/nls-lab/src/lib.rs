//! Batch front end for the radial experiment suites.
//!
//! A run is described by a structured config document (TOML, schema
//! version 1): which suite to run, the equation and grid, named sweeps and
//! tolerances, and a seed.  [`execute`] dispatches to the suite, and
//! [`write_report`] lays the result down as an append-only, timestamped
//! directory holding a machine-readable record, one flat table per fit,
//! one vector plot per fit, and a human summary.
//!
//! Reports are deterministic: the same config and seed serialize to
//! byte-identical records, which the test suite relies on.

pub mod config;
pub mod execute;
pub mod output;
pub mod plot;

pub use config::RunConfig;
pub use execute::execute;
pub use output::write_report;
pub use plot::render_plot;

use nls_core::experiments::ExperimentReport;

/// Errors split by exit-code class: configuration problems (exit 2) versus
/// runtime failures such as tripped guards or I/O (exit 3).
#[derive(Debug)]
pub enum LabError {
    /// The config document is malformed, inconsistent, or names unknown
    /// entities.
    Config(String),
    /// The run itself failed: solver guard, degenerate fit, I/O.
    Runtime(String),
}

impl std::fmt::Display for LabError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabError::Config(msg) => write!(f, "config error: {msg}"),
            LabError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl std::error::Error for LabError {}

impl From<nls_core::CoreError> for LabError {
    fn from(e: nls_core::CoreError) -> Self {
        LabError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Runtime(format!("i/o: {e}"))
    }
}

/// The overall verdict of a report, for the exit code: every fit must
/// pass, and so must the suite-level scalar verdicts.  Suites that scan a
/// family and only need one member to hold publish `any_pass`; their
/// per-member `pass_*` scalars are informational and do not gate.
pub fn report_passes(report: &ExperimentReport) -> bool {
    if !report.all_pass() {
        return false;
    }
    for (key, value) in &report.scalars {
        let gating = key == "any_pass" || (key.ends_with("_pass") && !key.starts_with("pass_"));
        if gating && *value == 0.0 {
            return false;
        }
    }
    true
}
