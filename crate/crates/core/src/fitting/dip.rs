use super::lsq::{least_squares, FitResult, Param, ParamKind};
use crate::broadening::{self, Spectrum};
use crate::error::{ensure_finite, invalid, Error, Result};
use crate::model::{CavityParams, DriveField, EmitterParams, Handedness};
use crate::units::ghz_to_rad;

const BETA_CEILING: f64 = 0.999_999;
const QUADRATURE_TOLERANCE: f64 = 1e-13;

/// Purcell factor and coupling efficiency from the measured emitter linewidth
/// Γ_tot = (1 + F_p)γ.
pub fn purcell_from_linewidth(gamma_total: f64, gamma_free: f64) -> Result<(f64, f64)> {
    ensure_finite("gamma_total", gamma_total)?;
    ensure_finite("gamma_free", gamma_free)?;
    if gamma_free <= 0.0 {
        return Err(invalid("gamma_free", format!("must be positive, got {gamma_free}")));
    }
    if gamma_total < gamma_free {
        return Err(invalid(
            "gamma_total",
            format!("linewidth {gamma_total} is narrower than the free-space rate {gamma_free}"),
        ));
    }
    let fp = gamma_total / gamma_free - 1.0;
    Ok((fp, fp / (fp + 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipGuess {
    pub beta: f64,
    /// Free-space decay rate γ (rad/s).
    pub gamma: f64,
    /// Spectral-fluctuation FWHM (rad/s).
    pub delta_sf: f64,
    /// Offset of the emitter-detuning axis (rad/s).
    pub qd_center: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipFitOptions {
    pub drive: DriveField,
    pub handedness: Handedness,
    /// Also fit γ. A Lorentzian jitter on a near-Lorentzian dip trades off
    /// against the linewidth, so γ is held at the guess by default.
    pub fit_gamma: bool,
}

/// Fits β, δ_sf and the axis offset (and optionally γ) to transmission
/// measured against emitter detuning, with the cavity known.
pub fn fit_qd_dip(
    spectrum: &Spectrum,
    cavity: &CavityParams,
    guess: &DipGuess,
    options: &DipFitOptions,
) -> Result<FitResult> {
    cavity.validate()?;
    options.drive.validate()?;
    EmitterParams::from_beta(guess.gamma, guess.beta, options.handedness)?
        .with_delta_sf(guess.delta_sf)
        .validate()?;
    if spectrum.len() < 10 {
        return Err(Error::BadSpectrum(format!(
            "dip fit needs at least 10 points, got {}",
            spectrum.len()
        )));
    }

    let ghz = 1.0 / ghz_to_rad(1.0);
    let mhz_floor = ghz_to_rad(1e-3);
    let mut params = vec![
        Param {
            name: "beta",
            kind: ParamKind::Dimensionless,
            initial: guess.beta,
            scale: 1e-3,
            to_working: 1.0,
        },
        Param {
            name: "delta_sf",
            kind: ParamKind::Frequency,
            initial: guess.delta_sf,
            scale: mhz_floor,
            to_working: ghz,
        },
        Param {
            name: "qd_center",
            kind: ParamKind::Frequency,
            initial: guess.qd_center,
            scale: mhz_floor,
            to_working: ghz,
        },
    ];
    if options.fit_gamma {
        params.push(Param {
            name: "gamma",
            kind: ParamKind::Frequency,
            initial: guess.gamma,
            scale: mhz_floor,
            to_working: ghz,
        });
    }

    let xs = spectrum.detunings();
    let ys = spectrum.values();
    let model = |p: &[f64]| -> Vec<f64> {
        let beta = p[0].clamp(0.0, BETA_CEILING);
        let delta_sf = ghz_to_rad(p[1].abs());
        let centre = ghz_to_rad(p[2]);
        let gamma = if options.fit_gamma {
            ghz_to_rad(p[3].abs()).max(f64::MIN_POSITIVE)
        } else {
            guess.gamma
        };
        let emitter = match EmitterParams::from_beta(gamma, beta, options.handedness) {
            Ok(e) => e.with_delta_sf(delta_sf),
            Err(_) => return vec![f64::NAN; xs.len()],
        };
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| {
                broadening::broadened_transmission_tol(
                    cavity,
                    &emitter.with_qd_detuning(x - centre),
                    &options.drive,
                    QUADRATURE_TOLERANCE,
                )
                .map_or(f64::NAN, |t| t - y)
            })
            .collect()
    };
    let mut fit = least_squares(&params, model)?;
    fit.values[1] = fit.values[1].abs();
    if options.fit_gamma {
        fit.values[3] = fit.values[3].abs();
    }
    Ok(fit)
}
