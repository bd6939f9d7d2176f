use chiral_core::g2::{g2_zero, purcell_1s_to_2s, PowerCalibration};
use chiral_core::model::{
    critical_power, transmission_total, CavityParams, Direction, DriveField, EmitterParams, Handedness,
};
use chiral_oracle::{build_liouvillian, g2_regression, steady_state_rho, transmission, TruncatedSystem};

use super::{model_err, num, ScenarioOutput};
use crate::config::ScenarioConfig;
use crate::output::Table;
use crate::parallel::try_map;
use crate::Error;

pub const T_TOLERANCE: f64 = 0.01;
pub const G2_TOLERANCE: f64 = 0.02;
pub const FORWARD_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
struct Row {
    beta: f64,
    t_analytic: f64,
    t_oracle: f64,
    g2_analytic: f64,
    g2_oracle: f64,
    g2_forward: f64,
    cutoff_ok: bool,
}

impl Row {
    fn t_error(&self) -> f64 {
        (self.t_analytic / self.t_oracle - 1.0).abs()
    }

    fn g2_error(&self) -> f64 {
        (self.g2_analytic / self.g2_oracle - 1.0).abs()
    }

    /// NaN errors (no g² mapping at this β) do not count as failures.
    fn failures(&self) -> usize {
        [
            self.t_error() > T_TOLERANCE,
            self.g2_error() > G2_TOLERANCE,
            (self.g2_forward - 1.0).abs() > FORWARD_TOLERANCE,
            !self.cutoff_ok,
        ]
        .into_iter()
        .filter(|&b| b)
        .count()
    }
}

enum Fail {
    Model(chiral_core::Error),
    Oracle(chiral_oracle::Error),
}

impl From<chiral_core::Error> for Fail {
    fn from(e: chiral_core::Error) -> Self {
        Fail::Model(e)
    }
}

impl From<chiral_oracle::Error> for Fail {
    fn from(e: chiral_oracle::Error) -> Self {
        Fail::Oracle(e)
    }
}

fn oracle_g2_zero(system: &TruncatedSystem) -> Result<(f64, f64, bool), chiral_oracle::Error> {
    let l = build_liouvillian(system)?;
    let ss = steady_state_rho(&l)?;
    let t = transmission(&l, &ss.rho)?;
    let g = g2_regression(&l, &ss.rho, &[0.0])?.values[0];
    Ok((t, g, ss.cutoff_adequate()))
}

/// Degenerate bad-cavity device with the configured κ and κ/g, resonant
/// drive at `power_fraction`·P_c. The coupling efficiency fixes γ.
fn compare(cfg: &ScenarioConfig, beta: f64) -> Result<Row, Fail> {
    let cavity = CavityParams::degenerate(
        chiral_core::units::ghz_to_rad(cfg.cavity.kappa_ghz),
        chiral_core::units::nm_to_m(cfg.cavity.wavelength_nm),
    )?;
    let kappa = cavity.kappa;
    let g = kappa / cfg.oracle.kappa_over_g;
    let fp1 = chiral_core::model::purcell_fp1_from_beta(beta)?;
    let gamma = 4.0 * g * g / (fp1 * kappa);
    let emitter = EmitterParams::new(gamma, fp1, Handedness::Right)?;
    let p_c = critical_power(&cavity, &emitter)?;
    let power = cfg.oracle.power_fraction * p_c;
    let drive = DriveField::new(0.0, power, Direction::Backward)?;
    let t_analytic = transmission_total(&cavity, &emitter, &drive)?.t_total;

    let system = TruncatedSystem {
        n_fock: cfg.oracle.n_fock,
        g,
        kappa,
        gamma,
        delta_h: 0.0,
        delta_v: 0.0,
        delta_omega: 0.0,
        handedness: Direction::Backward.effective_handedness(Handedness::Right),
        drive: drive.photon_flux(&cavity).sqrt(),
    };
    let (t_oracle, g2_oracle, cutoff_back) = oracle_g2_zero(&system)?;
    let forward = system.with_handedness(Direction::Forward.effective_handedness(Handedness::Right));
    let (_, g2_forward, cutoff_fwd) = oracle_g2_zero(&forward)?;

    // The two-sided g² form needs F_1S = β/(1−β) < 1.
    let f_1s = beta / (1.0 - beta);
    let g2_analytic = match purcell_1s_to_2s(f_1s) {
        Ok(f_2s) if f_1s < 1.0 => {
            let y = PowerCalibration::physical(f_2s).rabi_y(power, p_c);
            g2_zero(f_2s, y)
        }
        _ => f64::NAN,
    };
    Ok(Row {
        beta,
        t_analytic,
        t_oracle,
        g2_analytic,
        g2_oracle: if g2_analytic.is_nan() { f64::NAN } else { g2_oracle },
        g2_forward,
        cutoff_ok: cutoff_back && cutoff_fwd,
    })
}

pub(super) fn oracle_check(name: &'static str, cfg: &ScenarioConfig) -> Result<ScenarioOutput, Error> {
    let rows = try_map(&cfg.oracle.betas, |&b| compare(cfg, b)).map_err(|e| match e {
        Fail::Model(source) => model_err(name)(source),
        Fail::Oracle(source) => Error::Oracle { scenario: name, source },
    })?;

    let mut table = Table::new(
        "oracle_check",
        &[
            "beta",
            "t_analytic",
            "t_oracle",
            "t_rel_error",
            "g2_analytic",
            "g2_oracle",
            "g2_rel_error",
            "g2_forward_oracle",
            "passed",
        ],
    );
    let mut out = ScenarioOutput::default();
    for r in &rows {
        let failed = r.failures();
        out.failures += failed;
        table.push(vec![
            r.beta,
            r.t_analytic,
            r.t_oracle,
            r.t_error(),
            r.g2_analytic,
            r.g2_oracle,
            r.g2_error(),
            r.g2_forward,
            if failed == 0 { 1.0 } else { 0.0 },
        ]);
        let tag = |ok: bool| if ok { "ok" } else { "FAIL" };
        let b = num(r.beta);
        out.line(
            format!("t_rel_error[beta={b}]"),
            format!("{} ({})", num(r.t_error()), tag(r.t_error() <= T_TOLERANCE)),
        );
        if !r.g2_analytic.is_nan() {
            out.line(
                format!("g2_rel_error[beta={b}]"),
                format!("{} ({})", num(r.g2_error()), tag(r.g2_error() <= G2_TOLERANCE)),
            );
        }
        let fwd = (r.g2_forward - 1.0).abs();
        out.line(
            format!("g2_forward_deviation[beta={b}]"),
            format!("{} ({})", num(fwd), tag(fwd <= FORWARD_TOLERANCE)),
        );
        if !r.cutoff_ok {
            out.line(format!("fock_cutoff[beta={b}]"), "inadequate (FAIL)");
        }
    }
    out.tables = vec![table];
    Ok(out)
}
