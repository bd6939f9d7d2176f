use chiral_core::contrast::{resonance_detuning, transmission_at};
use chiral_core::fitting::fit_critical_power;
use chiral_core::g2::{forward_g2, g2_tau, g2_zero, purcell_1s_to_2s, G2Params, PowerCalibration};
use chiral_core::model::{critical_power, mean_photon_number, saturation_flux};
use chiral_core::units::{pw_to_w, rad_to_ghz, s_to_ns, w_to_pw};

use super::{model_err, num, ScenarioOutput};
use crate::config::ScenarioConfig;
use crate::output::Table;
use crate::parallel::try_map;
use crate::Error;

/// Dip saturation. The resonant transmission is rescaled between its
/// weak-drive and fully saturated (bare cavity) levels and fitted with
/// (P/P_c)/(1 + P/P_c).
pub(super) fn power_scan(name: &'static str, cfg: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let err = model_err(name);
    let cavity = cfg.cavity().map_err(&err)?;
    let emitter = cfg.emitter().map_err(&err)?;
    let weak = cfg.drive().map_err(&err)?.with_power(0.0);
    let powers = cfg.powers();
    let qds = cfg.qd_detunings();

    let points: Vec<(f64, f64)> = powers.iter().flat_map(|&p| qds.iter().map(move |&q| (p, q))).collect();
    let spectra = try_map(&points, |&(p, qd)| {
        transmission_at(&cavity, &emitter, &weak.with_power(p), qd)
    })
    .map_err(&err)?;

    let qd0 = resonance_detuning(&cavity, &emitter, &weak).map_err(&err)?;
    let resonant = try_map(&powers, |&p| {
        transmission_at(&cavity, &emitter, &weak.with_power(p), qd0)
    })
    .map_err(&err)?;
    let t_weak = transmission_at(&cavity, &emitter, &weak, qd0).map_err(&err)?;
    let bare = emitter.with_beta(0.0).map_err(&err)?;
    let t_bare = transmission_at(&cavity, &bare, &weak, qd0).map_err(&err)?;
    let span = t_bare - t_weak;
    if span.abs() < 1e-9 {
        return Err(Error::Scenario {
            scenario: name,
            message: "the emitter leaves no dip to saturate".into(),
        });
    }
    let normalised: Vec<f64> = resonant.iter().map(|t| (t - t_weak) / span).collect();
    let p_c = critical_power(&cavity, &emitter).map_err(&err)?;
    let fit = fit_critical_power(&powers, &normalised).map_err(&err)?;
    let p_fit = fit.value("p_c").unwrap_or(f64::NAN);
    let p_err = fit.standard_error("p_c").unwrap_or(f64::NAN);

    // Half-saturation power of this device; equals P_c only for a
    // degenerate cavity on resonance.
    let p_sat = saturation_flux(&cavity, &emitter.with_qd_detuning(qd0), &weak).map_err(&err)? * cavity.photon_energy();

    let mut scan = Table::new("power_scan", &["power_pw", "qd_detuning_ghz", "transmission"]);
    for (&(p, q), t) in points.iter().zip(spectra) {
        scan.push(vec![w_to_pw(p), rad_to_ghz(q), t]);
    }
    let mut res = Table::new(
        "power_resonant",
        &[
            "power_pw",
            "mean_photon_number",
            "transmission",
            "normalised",
            "saturation_law",
        ],
    );
    for ((&p, &t), &y) in powers.iter().zip(&resonant).zip(&normalised) {
        let n = mean_photon_number(&cavity, &emitter, p).map_err(&err)?;
        let x = p / p_c;
        res.push(vec![w_to_pw(p), n, t, y, x / (1.0 + x)]);
    }
    let mut summary = Table::new(
        "power_fit",
        &[
            "p_c_fit_pw",
            "p_c_stderr_pw",
            "p_c_analytic_pw",
            "p_sat_model_pw",
            "relative_error",
        ],
    );
    let rel = p_fit / p_c - 1.0;
    summary.push(vec![w_to_pw(p_fit), w_to_pw(p_err), w_to_pw(p_c), w_to_pw(p_sat), rel]);

    let mut out = ScenarioOutput::default();
    out.line("p_c_fit_pw", num(w_to_pw(p_fit)));
    out.line("p_c_analytic_pw", num(w_to_pw(p_c)));
    out.line("p_sat_model_pw", num(w_to_pw(p_sat)));
    out.line("p_c_relative_error", num(rel));
    out.tables = vec![scan, res, summary];
    Ok(out)
}

pub(super) fn g2(name: &'static str, cfg: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let err = model_err(name);
    let cavity = cfg.cavity().map_err(&err)?;
    let emitter = cfg.emitter().map_err(&err)?;
    let f_1s = cfg.g2.f_p_1s;
    let f_2s = purcell_1s_to_2s(f_1s).map_err(&err)?;
    let p_c = critical_power(&cavity, &emitter).map_err(&err)?;
    let cal = PowerCalibration::from_reference(pw_to_w(cfg.g2.reference_power_pw), p_c, cfg.g2.reference_g2, f_2s)
        .map_err(&err)?;

    let taus = cfg.delays();
    let mut curves = Table::new("g2_curves", &["power_pw", "tau_ns", "g2_backward", "g2_forward"]);
    let mut out = ScenarioOutput::default();
    out.line("f_p_2s", num(f_2s));
    out.line("c_y", num(cal.c_y));
    for &pw in &cfg.g2.powers_pw {
        let y = cal.rabi_y(pw_to_w(pw), p_c);
        let params = G2Params::new(f_1s, emitter.gamma, y).map_err(&err)?;
        let values = try_map(&taus, |&t| g2_tau(&params, t)).map_err(&err)?;
        for (&t, g) in taus.iter().zip(values) {
            curves.push(vec![pw, s_to_ns(t), g, forward_g2(t)]);
        }
        out.line(format!("g2_zero[power_pw={}]", num(pw)), num(g2_zero(f_2s, y)));
    }

    let mut zero = Table::new("g2_zero", &["power_pw", "rabi_y", "g2_zero"]);
    for p in cfg.powers() {
        let y = cal.rabi_y(p, p_c);
        zero.push(vec![w_to_pw(p), y, g2_zero(f_2s, y)]);
    }
    out.tables = vec![curves, zero];
    Ok(out)
}
