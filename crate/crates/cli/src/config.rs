//! Scenario configuration: `key = value` lines grouped under `[section]`
//! headers. Frequencies are entered as value/2π in GHz, powers in pW,
//! delays in ns and wavelengths in nm. Every key is optional; missing keys
//! take the device parameters of the reference experiment.

use std::path::{Path, PathBuf};

use chiral_core::model::{CavityParams, Direction, DriveField, EmitterParams, Handedness};
use chiral_core::units::{ghz_to_rad, nm_to_m, ns_to_s, pw_to_w};
use serde::Deserialize;

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Evenly spaced samples from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default = "linear")]
    pub spacing: Spacing,
}

fn linear() -> Spacing {
    Spacing::Linear
}

impl Grid {
    pub const fn linear(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub const fn log(start: f64, stop: f64, points: usize) -> Self {
        Self {
            start,
            stop,
            points,
            spacing: Spacing::Log,
        }
    }

    fn validate(&self) -> Result<(), String> {
        if self.points < 2 {
            return Err(format!("points must be at least 2, got {}", self.points));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err("start and stop must be finite".into());
        }
        if self.stop <= self.start {
            return Err(format!("stop ({}) must exceed start ({})", self.stop, self.start));
        }
        if self.spacing == Spacing::Log && self.start <= 0.0 {
            return Err("log spacing needs a positive start".into());
        }
        Ok(())
    }

    /// Sample values in the grid's own units. The end points are exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    return self.stop;
                }
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * f,
                    Spacing::Log => self.start * (self.stop / self.start).powf(f),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionName {
    Forward,
    Backward,
}

impl From<DirectionName> for Direction {
    fn from(d: DirectionName) -> Self {
        match d {
            DirectionName::Forward => Direction::Forward,
            DirectionName::Backward => Direction::Backward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HandednessName {
    Right,
    Left,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CavitySection {
    pub kappa_ghz: f64,
    pub split_ghz: f64,
    pub center_ghz: f64,
    pub wavelength_nm: f64,
}

impl Default for CavitySection {
    fn default() -> Self {
        Self {
            kappa_ghz: 102.0,
            split_ghz: 29.0,
            center_ghz: 0.0,
            wavelength_nm: 945.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitterSection {
    pub gamma_ghz: f64,
    pub beta: f64,
    pub handedness: HandednessName,
    pub delta_sf_ghz: f64,
}

impl Default for EmitterSection {
    fn default() -> Self {
        Self {
            gamma_ghz: 0.30,
            beta: 0.50,
            handedness: HandednessName::Right,
            delta_sf_ghz: 0.040,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveSection {
    pub laser_detuning_ghz: f64,
    pub power_pw: f64,
    pub direction: DirectionName,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self {
            laser_detuning_ghz: 0.0,
            power_pw: 0.0,
            direction: DirectionName::Backward,
        }
    }
}

/// Sample grids; each scenario reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// Emitter detuning (GHz).
    pub qd: Grid,
    /// Cavity-centre detuning (GHz).
    pub cavity: Grid,
    /// Laser detuning for bare-cavity spectra (GHz).
    pub laser: Grid,
    /// Input power (pW).
    pub power: Grid,
    /// Correlation delay (ns).
    pub tau: Grid,
    pub beta: Grid,
    /// Lateral displacement in units of the mode waist.
    pub position: Grid,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            qd: Grid::linear(-4.0, 4.0, 161),
            cavity: Grid::linear(-150.0, 150.0, 61),
            laser: Grid::linear(-300.0, 300.0, 301),
            power: Grid::log(1.0, 1.0e5, 41),
            tau: Grid::linear(-3.0, 3.0, 241),
            beta: Grid::linear(0.0, 0.95, 96),
            position: Grid::linear(0.0, 1.5, 61),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectraSection {
    /// Coupling efficiencies of the `dip-spectra` curves.
    pub betas: Vec<f64>,
}

impl Default for SpectraSection {
    fn default() -> Self {
        Self {
            betas: vec![0.12, 0.50, 0.72],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PositionSection {
    /// β with the emitter on the cavity axis.
    pub beta_center: f64,
}

impl Default for PositionSection {
    fn default() -> Self {
        Self { beta_center: 0.72 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct G2Section {
    /// One-sided Purcell factor used for the correlation model.
    pub f_p_1s: f64,
    /// Powers at which curves are drawn (pW).
    pub powers_pw: Vec<f64>,
    /// Calibration point: `reference_g2` is reached at `reference_power_pw`.
    pub reference_power_pw: f64,
    pub reference_g2: f64,
}

impl Default for G2Section {
    fn default() -> Self {
        Self {
            f_p_1s: 0.8,
            powers_pw: vec![5.0, 50.0, 500.0],
            reference_power_pw: 5.0,
            reference_g2: 101.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    pub n_fock: usize,
    /// κ/g of the bad-cavity test system.
    pub kappa_over_g: f64,
    /// Drive power as a fraction of P_c.
    pub power_fraction: f64,
    /// Coupling efficiencies compared; β = 0.5 is outside the g² mapping
    /// and is checked for transmission only.
    pub betas: Vec<f64>,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            n_fock: 4,
            kappa_over_g: 100.0,
            power_fraction: 0.01,
            betas: vec![0.2, 0.4, 0.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSection {
    /// Two-column CSV (detuning in GHz, transmission) to fit; relative
    /// paths resolve against the config file.
    pub input: Option<PathBuf>,
    pub beta_guess: f64,
    pub delta_sf_guess_ghz: f64,
    pub fit_gamma: bool,
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            input: None,
            beta_guess: 0.5,
            delta_sf_guess_ghz: 0.05,
            fit_gamma: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub cavity: CavitySection,
    pub emitter: EmitterSection,
    pub drive: DriveSection,
    pub grid: GridSection,
    pub spectra: SpectraSection,
    pub position: PositionSection,
    pub g2: G2Section,
    pub oracle: OracleSection,
    pub fit: FitSection,
}

/// 1-based line of `key` inside `[section]`, or of the section header.
fn locate(source: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut current = String::new();
    let mut header = None;
    for (i, raw) in source.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header = Some(i + 1);
            }
            continue;
        }
        if current == section {
            if let Some(k) = key {
                let lhs = line.split('=').next().unwrap_or("").trim();
                if lhs == k {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

impl ScenarioConfig {
    pub fn parse(source: &str, path: &Path) -> Result<Self, Error> {
        let mut cfg: Self = toml::from_str(source).map_err(|e| {
            let line = e
                .span()
                .map(|s| source[..s.start.min(source.len())].matches('\n').count() + 1);
            Error::Config {
                path: path.to_path_buf(),
                line,
                field: String::new(),
                message: e.message().to_string(),
            }
        })?;
        if let Some(input) = &cfg.fit.input {
            if input.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.fit.input = Some(dir.join(input));
                }
            }
        }
        cfg.validate().map_err(|(section, key, message)| Error::Config {
            path: path.to_path_buf(),
            line: locate(source, section, key),
            field: match key {
                Some(k) => format!("{section}.{k}"),
                None => section.to_string(),
            },
            message,
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let source = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&source, path)
    }

    fn validate(&self) -> Result<(), (&'static str, Option<&'static str>, String)> {
        fn positive(v: f64) -> Result<(), String> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(format!("must be positive, got {v}"))
            }
        }
        fn finite(v: f64) -> Result<(), String> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("must be finite, got {v}"))
            }
        }
        fn beta(v: f64) -> Result<(), String> {
            if (0.0..1.0).contains(&v) {
                Ok(())
            } else {
                Err(format!("must lie in [0, 1), got {v}"))
            }
        }
        fn non_negative(v: f64) -> Result<(), String> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(format!("must be non-negative, got {v}"))
            }
        }
        let checks: Vec<(&'static str, &'static str, Result<(), String>)> = vec![
            ("cavity", "kappa_ghz", positive(self.cavity.kappa_ghz)),
            ("cavity", "split_ghz", finite(self.cavity.split_ghz)),
            ("cavity", "center_ghz", finite(self.cavity.center_ghz)),
            ("cavity", "wavelength_nm", positive(self.cavity.wavelength_nm)),
            ("emitter", "gamma_ghz", positive(self.emitter.gamma_ghz)),
            ("emitter", "beta", beta(self.emitter.beta)),
            ("emitter", "delta_sf_ghz", non_negative(self.emitter.delta_sf_ghz)),
            ("drive", "laser_detuning_ghz", finite(self.drive.laser_detuning_ghz)),
            ("drive", "power_pw", non_negative(self.drive.power_pw)),
            ("position", "beta_center", beta(self.position.beta_center)),
            ("g2", "f_p_1s", {
                let f = self.g2.f_p_1s;
                if (0.0..1.0).contains(&f) {
                    Ok(())
                } else {
                    Err(format!("must lie in [0, 1) for the two-sided mapping, got {f}"))
                }
            }),
            ("g2", "reference_power_pw", positive(self.g2.reference_power_pw)),
            ("g2", "reference_g2", non_negative(self.g2.reference_g2)),
            ("oracle", "n_fock", {
                if self.oracle.n_fock >= 2 {
                    Ok(())
                } else {
                    Err(format!("must be at least 2, got {}", self.oracle.n_fock))
                }
            }),
            ("oracle", "kappa_over_g", positive(self.oracle.kappa_over_g)),
            ("oracle", "power_fraction", positive(self.oracle.power_fraction)),
            ("fit", "beta_guess", beta(self.fit.beta_guess)),
            ("fit", "delta_sf_guess_ghz", non_negative(self.fit.delta_sf_guess_ghz)),
        ];
        for (section, key, r) in checks {
            r.map_err(|m| (section, Some(key), m))?;
        }
        for &b in &self.spectra.betas {
            beta(b).map_err(|m| ("spectra", Some("betas"), m))?;
        }
        if self.spectra.betas.is_empty() {
            return Err(("spectra", Some("betas"), "list is empty".into()));
        }
        for &p in &self.g2.powers_pw {
            positive(p).map_err(|m| ("g2", Some("powers_pw"), m))?;
        }
        for &b in &self.oracle.betas {
            beta(b).map_err(|m| ("oracle", Some("betas"), m))?;
        }
        let grids = [
            ("grid.qd", &self.grid.qd),
            ("grid.cavity", &self.grid.cavity),
            ("grid.laser", &self.grid.laser),
            ("grid.power", &self.grid.power),
            ("grid.tau", &self.grid.tau),
            ("grid.beta", &self.grid.beta),
            ("grid.position", &self.grid.position),
        ];
        for (name, g) in grids {
            g.validate().map_err(|m| (name, None, m))?;
        }
        if self.grid.power.start <= 0.0 {
            return Err(("grid.power", Some("start"), "powers must be positive".into()));
        }
        if self.grid.beta.start < 0.0 || self.grid.beta.stop >= 1.0 {
            return Err(("grid.beta", None, "β must stay inside [0, 1)".into()));
        }
        if self.grid.position.start < 0.0 {
            return Err((
                "grid.position",
                Some("start"),
                "displacements must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn cavity(&self) -> chiral_core::Result<CavityParams> {
        CavityParams::split(
            ghz_to_rad(self.cavity.kappa_ghz),
            ghz_to_rad(self.cavity.split_ghz),
            ghz_to_rad(self.cavity.center_ghz),
            nm_to_m(self.cavity.wavelength_nm),
        )
    }

    pub fn handedness(&self) -> Handedness {
        match self.emitter.handedness {
            HandednessName::Right => Handedness::Right,
            HandednessName::Left => Handedness::Left,
        }
    }

    /// Emitter with the configured β and jitter, at zero detuning.
    pub fn emitter(&self) -> chiral_core::Result<EmitterParams> {
        Ok(
            EmitterParams::from_beta(ghz_to_rad(self.emitter.gamma_ghz), self.emitter.beta, self.handedness())?
                .with_delta_sf(ghz_to_rad(self.emitter.delta_sf_ghz)),
        )
    }

    pub fn drive(&self) -> chiral_core::Result<DriveField> {
        DriveField::new(
            ghz_to_rad(self.drive.laser_detuning_ghz),
            pw_to_w(self.drive.power_pw),
            self.drive.direction.into(),
        )
    }

    pub fn qd_detunings(&self) -> Vec<f64> {
        self.grid.qd.values().into_iter().map(ghz_to_rad).collect()
    }

    pub fn cavity_detunings(&self) -> Vec<f64> {
        self.grid.cavity.values().into_iter().map(ghz_to_rad).collect()
    }

    pub fn laser_detunings(&self) -> Vec<f64> {
        self.grid.laser.values().into_iter().map(ghz_to_rad).collect()
    }

    pub fn powers(&self) -> Vec<f64> {
        self.grid.power.values().into_iter().map(pw_to_w).collect()
    }

    pub fn delays(&self) -> Vec<f64> {
        self.grid.tau.values().into_iter().map(ns_to_s).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> Result<ScenarioConfig, Error> {
        ScenarioConfig::parse(src, Path::new("test.toml"))
    }

    #[test]
    fn empty_file_gives_reference_device() {
        let cfg = parse("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.cavity.kappa_ghz, 102.0);
        assert_eq!(cfg.emitter.delta_sf_ghz, 0.040);
    }

    #[test]
    fn sections_override_defaults() {
        let cfg = parse(
            "# comment\n[emitter]\nbeta = 0.72\nhandedness = \"left\"\n\n[grid.qd]\nstart = -1\nstop = 1\npoints = 5\n",
        )
        .unwrap();
        assert_eq!(cfg.emitter.beta, 0.72);
        assert_eq!(cfg.handedness(), Handedness::Left);
        assert_eq!(cfg.grid.qd.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse("[cavity]\nkappa_ghz = 102\nsplit_ghz = = 3\n").unwrap_err();
        match err {
            Error::Config { line, .. } => assert_eq!(line, Some(3)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse("[cavity]\nkappa_ghz = 102\nkapa = 3\n").unwrap_err();
        let text = err.to_string();
        assert!(matches!(err, Error::Config { line: Some(3), .. }), "{text}");
        assert!(text.contains("kapa"), "{text}");
    }

    #[test]
    fn invalid_value_reports_field_and_line() {
        let err = parse("[emitter]\ngamma_ghz = 0.3\nbeta = 1.5\n").unwrap_err();
        match &err {
            Error::Config { line, field, .. } => {
                assert_eq!(*line, Some(3));
                assert_eq!(field, "emitter.beta");
            }
            e => panic!("{e}"),
        }
        assert!(err.to_string().contains("emitter.beta"));
    }

    #[test]
    fn short_grid_is_rejected() {
        let err = parse("[grid.tau]\nstart = 0\nstop = 1\npoints = 1\n").unwrap_err();
        match err {
            Error::Config { line, field, .. } => {
                assert_eq!(line, Some(1));
                assert_eq!(field, "grid.tau");
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn log_grid_hits_end_points() {
        let g = Grid::log(1.0, 1e5, 6);
        let v = g.values();
        assert_eq!(v[0], 1.0);
        assert_eq!(v[5], 1e5);
        assert!((v[2] - 100.0).abs() < 1e-9);
    }

    #[test]
    fn relative_fit_input_resolves_against_config() {
        let cfg = ScenarioConfig::parse("[fit]\ninput = \"data.csv\"\n", Path::new("/tmp/run/cfg.toml")).unwrap();
        assert_eq!(cfg.fit.input.unwrap(), PathBuf::from("/tmp/run/data.csv"));
    }
}
