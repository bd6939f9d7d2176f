use std::path::{Path, PathBuf};

use chiral_core::broadening::{broadened_transmission, Spectrum};
use chiral_core::fitting::{
    copolarized_cavity_transmission, fit_double_lorentzian, fit_qd_dip, DipFitOptions, DipGuess, DoubleLorentzian,
    FitResult,
};
use chiral_core::model::{cavity_mode_response, EmitterParams};
use chiral_core::units::{ghz_to_rad, rad_to_ghz};

use super::{model_err, num, ScenarioOutput};
use crate::config::ScenarioConfig;
use crate::output::Table;
use crate::Error;

fn fit_table(name: &str, fit: &FitResult) -> Table {
    Table {
        name: name.into(),
        header: fit.csv_header(),
        rows: vec![fit.csv_values()],
    }
}

fn fit_summary(out: &mut ScenarioOutput, fit: &FitResult) {
    for (h, v) in fit.csv_header().iter().zip(fit.csv_values()) {
        if !h.ends_with("_stderr") {
            out.line(h, num(v));
        }
    }
}

/// Bare-cavity spectra against laser detuning: the co-polarised
/// transmission and the two linear-mode intensity responses, whose sum is
/// fitted with the double-Lorentzian model as a measured peak would be.
pub(super) fn cavity_spectrum(name: &'static str, cfg: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let err = model_err(name);
    let cavity = cfg.cavity().map_err(&err)?;
    let lasers = cfg.laser_detunings();
    let mut rows = Vec::with_capacity(lasers.len());
    for &d in &lasers {
        let (t_h, t_v) = cavity_mode_response(&cavity, d).map_err(&err)?;
        let co = copolarized_cavity_transmission(cavity.kappa, cavity.mode_splitting(), d + cavity.center_detuning())
            .map_err(&err)?;
        rows.push([rad_to_ghz(d), co, t_h.norm_sqr(), t_v.norm_sqr()]);
    }
    let peak = Spectrum::new(lasers, rows.iter().map(|r| r[2] + r[3]).collect()).map_err(&err)?;
    let fit = fit_double_lorentzian(&peak, &DoubleLorentzian::guess_from(&peak)).map_err(&err)?;

    let mut table = Table::new(
        "cavity_spectrum",
        &[
            "laser_detuning_ghz",
            "copolarized",
            "mode_h",
            "mode_v",
            "double_lorentzian",
        ],
    );
    for r in rows {
        table.push(vec![r[0], r[1], r[2], r[3], r[2] + r[3]]);
    }
    let mut out = ScenarioOutput::default();
    fit_summary(&mut out, &fit);
    out.tables = vec![table, fit_table("cavity_fit", &fit)];
    Ok(out)
}

/// Two numeric columns (detuning in GHz, transmission) with a header row.
fn read_trace(path: &Path) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let field = |k: usize| -> Result<f64, Error> {
            let raw = record.get(k).unwrap_or("");
            raw.trim().parse().map_err(|_| Error::Config {
                path: path.to_path_buf(),
                // Header is line 1.
                line: Some(i + 2),
                field: format!("column {}", k + 1),
                message: format!("not a number: {raw:?}"),
            })
        };
        xs.push(field(0)?);
        ys.push(field(1)?);
    }
    Ok((xs, ys))
}

fn input(name: &'static str, cfg: &ScenarioConfig) -> Result<PathBuf, Error> {
    cfg.fit.input.clone().ok_or(Error::Scenario {
        scenario: name,
        message: "fit.input is not set".into(),
    })
}

pub(super) fn fit_cavity(name: &'static str, cfg: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let err = model_err(name);
    let (xs, ys) = read_trace(&input(name, cfg)?)?;
    let spectrum = Spectrum::new(xs.into_iter().map(ghz_to_rad).collect(), ys).map_err(&err)?;
    let fit = fit_double_lorentzian(&spectrum, &DoubleLorentzian::guess_from(&spectrum)).map_err(&err)?;
    let mut out = ScenarioOutput::default();
    fit_summary(&mut out, &fit);
    out.tables = vec![fit_table("cavity_fit", &fit)];
    Ok(out)
}

pub(super) fn fit_dip(name: &'static str, cfg: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let err = model_err(name);
    let cavity = cfg.cavity().map_err(&err)?;
    let emitter = cfg.emitter().map_err(&err)?;
    let drive = cfg.drive().map_err(&err)?;
    let (xs, ys) = read_trace(&input(name, cfg)?)?;
    let spectrum = Spectrum::new(xs.into_iter().map(ghz_to_rad).collect(), ys).map_err(&err)?;
    let guess = DipGuess {
        beta: cfg.fit.beta_guess,
        gamma: emitter.gamma,
        delta_sf: ghz_to_rad(cfg.fit.delta_sf_guess_ghz),
        qd_center: 0.0,
    };
    let options = DipFitOptions {
        drive,
        handedness: cfg.handedness(),
        fit_gamma: cfg.fit.fit_gamma,
    };
    let fit = fit_qd_dip(&spectrum, &cavity, &guess, &options).map_err(&err)?;

    let gamma = fit.value("gamma").unwrap_or(emitter.gamma);
    let centre = fit.value("qd_center").unwrap_or(0.0);
    let fitted = EmitterParams::from_beta(gamma, fit.value("beta").unwrap_or(f64::NAN), cfg.handedness())
        .map_err(&err)?
        .with_delta_sf(fit.value("delta_sf").unwrap_or(0.0));
    let mut curve = Table::new("dip_fit_curve", &["qd_detuning_ghz", "measured", "model"]);
    for (x, y) in spectrum.iter() {
        let m = broadened_transmission(&cavity, &fitted.with_qd_detuning(x - centre), &drive).map_err(&err)?;
        curve.push(vec![rad_to_ghz(x), y, m]);
    }
    let mut out = ScenarioOutput::default();
    fit_summary(&mut out, &fit);
    out.tables = vec![fit_table("dip_fit", &fit), curve];
    Ok(out)
}
