//! One function per scenario. Each returns its tables and a few summary
//! lines; nothing is written here.

mod cavity;
mod maps;
mod oracle;
mod power;
mod spectra;

use crate::config::ScenarioConfig;
use crate::output::Table;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    DipSpectra,
    ContrastPosition,
    DetuningMap,
    Cuts,
    PowerScan,
    G2,
    CavitySpectrum,
    ContrastVsBeta,
    OracleCheck,
    FitCavity,
    FitDip,
}

impl Scenario {
    pub const ALL: [Scenario; 11] = [
        Scenario::DipSpectra,
        Scenario::ContrastPosition,
        Scenario::DetuningMap,
        Scenario::Cuts,
        Scenario::PowerScan,
        Scenario::G2,
        Scenario::CavitySpectrum,
        Scenario::ContrastVsBeta,
        Scenario::OracleCheck,
        Scenario::FitCavity,
        Scenario::FitDip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::DipSpectra => "dip-spectra",
            Scenario::ContrastPosition => "contrast-position",
            Scenario::DetuningMap => "detuning-map",
            Scenario::Cuts => "cuts",
            Scenario::PowerScan => "power-scan",
            Scenario::G2 => "g2",
            Scenario::CavitySpectrum => "cavity-spectrum",
            Scenario::ContrastVsBeta => "contrast-vs-beta",
            Scenario::OracleCheck => "oracle-check",
            Scenario::FitCavity => "fit-cavity",
            Scenario::FitDip => "fit-dip",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Scenario::DipSpectra => "transmission vs emitter detuning for several coupling efficiencies",
            Scenario::ContrastPosition => "dip contrast vs lateral emitter position",
            Scenario::DetuningMap => "transmission vs emitter and cavity detuning, both directions",
            Scenario::Cuts => "line cuts through the detuning maps and the isolation",
            Scenario::PowerScan => "saturation of the dip with input power and a critical-power fit",
            Scenario::G2 => "intensity correlation of the transmitted light",
            Scenario::CavitySpectrum => "bare-cavity co- and cross-polarised spectra",
            Scenario::ContrastVsBeta => "dip contrast vs coupling efficiency and its optimum",
            Scenario::OracleCheck => "closed-form model against the master-equation solution",
            Scenario::FitCavity => "double-Lorentzian fit of a measured cavity spectrum",
            Scenario::FitDip => "coupling and jitter fit of a measured emitter dip",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioOutput {
    pub tables: Vec<Table>,
    /// `key = value` lines for the terminal.
    pub summary: Vec<String>,
    /// Checks outside tolerance; any makes the run fail.
    pub failures: usize,
}

impl ScenarioOutput {
    fn line(&mut self, key: impl std::fmt::Display, value: impl std::fmt::Display) {
        self.summary.push(format!("{key} = {value}"));
    }
}

pub fn run_scenario(scenario: Scenario, config: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let name = scenario.name();
    match scenario {
        Scenario::DipSpectra => spectra::dip_spectra(name, config),
        Scenario::ContrastPosition => spectra::contrast_position(name, config),
        Scenario::ContrastVsBeta => spectra::contrast_vs_beta(name, config),
        Scenario::DetuningMap => maps::detuning_map(name, config),
        Scenario::Cuts => maps::cuts(name, config),
        Scenario::PowerScan => power::power_scan(name, config),
        Scenario::G2 => power::g2(name, config),
        Scenario::CavitySpectrum => cavity::cavity_spectrum(name, config),
        Scenario::FitCavity => cavity::fit_cavity(name, config),
        Scenario::FitDip => cavity::fit_dip(name, config),
        Scenario::OracleCheck => oracle::oracle_check(name, config),
    }
}

fn model_err(scenario: &'static str) -> impl Fn(chiral_core::Error) -> Error {
    move |source| Error::Model { scenario, source }
}

/// Compact number for summary lines.
fn num(v: f64) -> String {
    crate::output::format_number(v)
}
