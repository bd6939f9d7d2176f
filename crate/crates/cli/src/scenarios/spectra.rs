use chiral_core::contrast::{dip_contrast, transmission_at, DipContrast};
use chiral_core::fitting::optimal_beta_for_contrast;
use chiral_core::model::beta_at_position;
use chiral_core::units::rad_to_ghz;

use super::{model_err, num, ScenarioOutput};
use crate::config::ScenarioConfig;
use crate::output::Table;
use crate::parallel::try_map;
use crate::Error;

pub(super) const CONTRAST_HEADER: [&str; 4] = ["contrast", "t_dip", "t_far", "dip_detuning_ghz"];

pub(super) fn contrast_row(c: &DipContrast) -> [f64; 4] {
    [c.contrast, c.t_dip, c.t_far, rad_to_ghz(c.dip_detuning)]
}

fn with_key(key: f64, rest: [f64; 4]) -> Vec<f64> {
    let mut row = vec![key];
    row.extend(rest);
    row
}

fn header_with(first: &str) -> Vec<&str> {
    let mut h = vec![first];
    h.extend(CONTRAST_HEADER);
    h
}

pub(super) fn dip_spectra(name: &'static str, cfg: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let err = model_err(name);
    let cavity = cfg.cavity().map_err(&err)?;
    let base = cfg.emitter().map_err(&err)?;
    let drive = cfg.drive().map_err(&err)?;
    let qds = cfg.qd_detunings();
    let emitters = cfg
        .spectra
        .betas
        .iter()
        .map(|&b| base.with_beta(b))
        .collect::<Result<Vec<_>, _>>()
        .map_err(&err)?;

    let points: Vec<(usize, f64)> = (0..emitters.len())
        .flat_map(|i| qds.iter().map(move |&q| (i, q)))
        .collect();
    let values = try_map(&points, |&(i, qd)| transmission_at(&cavity, &emitters[i], &drive, qd)).map_err(&err)?;
    let contrasts = try_map(&emitters, |e| dip_contrast(&cavity, e, &drive)).map_err(&err)?;

    let mut curves = Table::new("dip_spectra", &["beta", "qd_detuning_ghz", "transmission"]);
    for (&(i, qd), t) in points.iter().zip(values) {
        curves.push(vec![cfg.spectra.betas[i], rad_to_ghz(qd), t]);
    }
    let mut table = Table::new("dip_contrast", &header_with("beta"));
    let mut out = ScenarioOutput::default();
    for (&beta, c) in cfg.spectra.betas.iter().zip(&contrasts) {
        table.push(with_key(beta, contrast_row(c)));
        out.line(format!("contrast[beta={}]", num(beta)), num(c.contrast));
    }
    out.tables = vec![curves, table];
    Ok(out)
}

pub(super) fn contrast_position(name: &'static str, cfg: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let err = model_err(name);
    let cavity = cfg.cavity().map_err(&err)?;
    let base = cfg.emitter().map_err(&err)?;
    let drive = cfg.drive().map_err(&err)?;
    let positions = cfg.grid.position.values();
    let rows = try_map(&positions, |&r| {
        let beta = beta_at_position(cfg.position.beta_center, r, 1.0)?;
        let c = dip_contrast(&cavity, &base.with_beta(beta)?, &drive)?;
        Ok::<_, chiral_core::Error>((beta, c))
    })
    .map_err(&err)?;

    let mut h = vec!["position_waists", "beta"];
    h.extend(CONTRAST_HEADER);
    let mut table = Table::new("contrast_position", &h);
    for (&r, (beta, c)) in positions.iter().zip(&rows) {
        let mut row = vec![r, *beta];
        row.extend(contrast_row(c));
        table.push(row);
    }
    let mut out = ScenarioOutput::default();
    out.line("contrast[centre]", num(rows[0].1.contrast));
    out.line("contrast[edge]", num(rows[rows.len() - 1].1.contrast));
    out.tables = vec![table];
    Ok(out)
}

pub(super) fn contrast_vs_beta(name: &'static str, cfg: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let err = model_err(name);
    let cavity = cfg.cavity().map_err(&err)?;
    let base = cfg.emitter().map_err(&err)?;
    let drive = cfg.drive().map_err(&err)?;
    let betas = cfg.grid.beta.values();
    let rows = try_map(&betas, |&b| dip_contrast(&cavity, &base.with_beta(b)?, &drive)).map_err(&err)?;
    let (beta_opt, contrast_opt) = optimal_beta_for_contrast(&cavity, &base, &drive).map_err(&err)?;

    let mut table = Table::new("contrast_vs_beta", &header_with("beta"));
    for (&b, c) in betas.iter().zip(&rows) {
        table.push(with_key(b, contrast_row(c)));
    }
    let mut optimum = Table::new("contrast_optimum", &["beta", "contrast"]);
    optimum.push(vec![beta_opt, contrast_opt]);
    let mut out = ScenarioOutput::default();
    out.line("optimal_beta", num(beta_opt));
    out.line("optimal_contrast", num(contrast_opt));
    out.tables = vec![table, optimum];
    Ok(out)
}
