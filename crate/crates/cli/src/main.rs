use std::path::PathBuf;
use std::process::ExitCode;

use chiral_cli::output::write_tables;
use chiral_cli::{run_scenario, Error, Scenario, ScenarioConfig};
use clap::Parser;

/// Transmission, non-reciprocity and photon statistics of a chiral
/// emitter–cavity diode, written as CSV.
#[derive(Debug, Parser)]
#[command(name = "chiral1d", version)]
struct Args {
    /// Scenario to run (see --list).
    scenario: Option<String>,
    /// Configuration file; missing keys take the reference device values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for the CSV files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// List the scenarios and exit.
    #[arg(long)]
    list: bool,
}

fn run(args: &Args) -> Result<(), Error> {
    let config = match &args.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    let name = args.scenario.as_deref().unwrap_or_default();
    let scenario = Scenario::from_name(name).ok_or_else(|| Error::Scenario {
        scenario: "chiral1d",
        message: format!("unknown scenario {name:?}; try --list"),
    })?;
    let output = run_scenario(scenario, &config)?;
    for line in &output.summary {
        println!("{line}");
    }
    if output.failures > 0 {
        return Err(Error::OracleMismatch(output.failures));
    }
    for path in write_tables(&args.out_dir, &output.tables)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list {
        for s in Scenario::ALL {
            println!("{:<18} {}", s.name(), s.description());
        }
        return ExitCode::SUCCESS;
    }
    if args.scenario.is_none() {
        eprintln!("error: a scenario is required; try --list");
        return ExitCode::from(2);
    }
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
