use chiral_core::contrast::{dip_contrast, resonance_detuning, transmission_at};
use chiral_core::model::{CavityParams, Direction, DriveField, EmitterParams};
use chiral_core::units::rad_to_ghz;

use super::{model_err, num, ScenarioOutput};
use crate::config::ScenarioConfig;
use crate::output::Table;
use crate::parallel::try_map;
use crate::Error;

type Setup = (CavityParams, EmitterParams, DriveField, DriveField);

fn setup(name: &'static str, cfg: &ScenarioConfig) -> Result<Setup, Error> {
    let err = model_err(name);
    let drive = cfg.drive().map_err(&err)?;
    Ok((
        cfg.cavity().map_err(&err)?,
        cfg.emitter().map_err(&err)?,
        DriveField {
            direction: Direction::Backward,
            ..drive
        },
        DriveField {
            direction: Direction::Forward,
            ..drive
        },
    ))
}

pub(super) fn detuning_map(name: &'static str, cfg: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let err = model_err(name);
    let (cavity, emitter, backward, forward) = setup(name, cfg)?;
    let cavities = cfg.cavity_detunings();
    let qds = cfg.qd_detunings();

    let points: Vec<(f64, f64)> = cavities
        .iter()
        .flat_map(|&c| qds.iter().map(move |&q| (c, q)))
        .collect();
    let values = try_map(&points, |&(c, qd)| {
        let shifted = cavity.with_center_detuning(c);
        Ok::<_, chiral_core::Error>((
            transmission_at(&shifted, &emitter, &backward, qd)?,
            transmission_at(&shifted, &emitter, &forward, qd)?,
        ))
    })
    .map_err(&err)?;
    let rows = try_map(&cavities, |&c| {
        let shifted = cavity.with_center_detuning(c);
        Ok::<_, chiral_core::Error>((
            dip_contrast(&shifted, &emitter, &backward)?,
            dip_contrast(&shifted, &emitter, &forward)?,
        ))
    })
    .map_err(&err)?;

    let mut map = Table::new(
        "detuning_map",
        &["cavity_detuning_ghz", "qd_detuning_ghz", "t_backward", "t_forward"],
    );
    for (&(c, q), (tb, tf)) in points.iter().zip(values) {
        map.push(vec![rad_to_ghz(c), rad_to_ghz(q), tb, tf]);
    }
    let mut contrast = Table::new(
        "map_contrast",
        &[
            "cavity_detuning_ghz",
            "resonance_ghz",
            "contrast_backward",
            "t_dip_backward",
            "t_far_backward",
            "contrast_forward",
        ],
    );
    let mut best = (f64::NEG_INFINITY, 0.0);
    for (&c, (b, f)) in cavities.iter().zip(&rows) {
        contrast.push(vec![
            rad_to_ghz(c),
            rad_to_ghz(b.dip_detuning),
            b.contrast,
            b.t_dip,
            b.t_far,
            f.contrast,
        ]);
        if b.contrast > best.0 {
            best = (b.contrast, c);
        }
    }
    let mut out = ScenarioOutput::default();
    out.line("max_contrast_backward", num(best.0));
    out.line("max_contrast_cavity_detuning_ghz", num(rad_to_ghz(best.1)));
    out.tables = vec![map, contrast];
    Ok(out)
}

pub(super) fn cuts(name: &'static str, cfg: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let err = model_err(name);
    let (cavity, emitter, backward, forward) = setup(name, cfg)?;

    let qds = cfg.qd_detunings();
    let along_qd = try_map(&qds, |&qd| {
        Ok::<_, chiral_core::Error>((
            transmission_at(&cavity, &emitter, &backward, qd)?,
            transmission_at(&cavity, &emitter, &forward, qd)?,
        ))
    })
    .map_err(&err)?;

    // Along the cavity axis the emitter follows its shifted resonance.
    let cavities = cfg.cavity_detunings();
    let along_cavity = try_map(&cavities, |&c| {
        let shifted = cavity.with_center_detuning(c);
        let qd = resonance_detuning(&shifted, &emitter, &backward)?;
        Ok::<_, chiral_core::Error>((
            qd,
            transmission_at(&shifted, &emitter, &backward, qd)?,
            transmission_at(&shifted, &emitter, &forward, qd)?,
        ))
    })
    .map_err(&err)?;

    let mut cut_qd = Table::new("cut_qd", &["qd_detuning_ghz", "t_backward", "t_forward"]);
    for (&qd, (tb, tf)) in qds.iter().zip(along_qd) {
        cut_qd.push(vec![rad_to_ghz(qd), tb, tf]);
    }
    let mut cut_cavity = Table::new(
        "cut_cavity",
        &["cavity_detuning_ghz", "qd_detuning_ghz", "t_backward", "t_forward"],
    );
    for (&c, (qd, tb, tf)) in cavities.iter().zip(along_cavity) {
        cut_cavity.push(vec![rad_to_ghz(c), rad_to_ghz(qd), tb, tf]);
    }

    let qd = resonance_detuning(&cavity, &emitter, &backward).map_err(&err)?;
    let tb = transmission_at(&cavity, &emitter, &backward, qd).map_err(&err)?;
    let tf = transmission_at(&cavity, &emitter, &forward, qd).map_err(&err)?;
    let mut out = ScenarioOutput::default();
    out.line("t_backward", num(tb));
    out.line("t_forward", num(tf));
    out.line("isolation", num(tf / tb));
    out.line("isolation_db", num(10.0 * (tf / tb).log10()));
    out.tables = vec![cut_qd, cut_cavity];
    Ok(out)
}
