//! Scenario runner for the chiral cavity diode: each scenario evaluates the
//! closed-form model (or the brute-force oracle) on a configured grid and
//! returns CSV tables.

pub mod config;
pub mod output;
pub mod parallel;
pub mod scenarios;

use std::path::PathBuf;

pub use config::ScenarioConfig;
pub use scenarios::{run_scenario, Scenario, ScenarioOutput};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}", config_message(.path, .line, .field, .message))]
    Config {
        path: PathBuf,
        line: Option<usize>,
        field: String,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{scenario}: {source}")]
    Model {
        scenario: &'static str,
        #[source]
        source: chiral_core::Error,
    },
    #[error("{scenario}: {source}")]
    Oracle {
        scenario: &'static str,
        #[source]
        source: chiral_oracle::Error,
    },
    #[error("{scenario}: {message}")]
    Scenario { scenario: &'static str, message: String },
    #[error("{0} oracle check(s) outside tolerance")]
    OracleMismatch(usize),
}

fn config_message(path: &std::path::Path, line: &Option<usize>, field: &str, message: &str) -> String {
    let mut out = path.display().to_string();
    if let Some(l) = line {
        out.push_str(&format!(":{l}"));
    }
    out.push_str(": ");
    if !field.is_empty() {
        out.push_str(field);
        out.push_str(": ");
    }
    out.push_str(message);
    out
}
