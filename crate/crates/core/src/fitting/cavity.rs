use num_complex::Complex64;

use super::lsq::{least_squares, FitResult, Param, ParamKind};
use crate::broadening::Spectrum;
use crate::error::{ensure_finite, invalid, Error, Result};
use crate::units::ghz_to_rad;

fn mode(kappa: f64, detuning: f64) -> Complex64 {
    Complex64::new(1.0, 2.0 * detuning / kappa).inv()
}

fn check_kappa(kappa: f64, lambda_split: f64, laser_detuning: f64) -> Result<()> {
    ensure_finite("kappa", kappa)?;
    ensure_finite("lambda_split", lambda_split)?;
    ensure_finite("laser_detuning", laser_detuning)?;
    if kappa <= 0.0 {
        return Err(invalid("kappa", format!("must be positive, got {kappa}")));
    }
    Ok(())
}

/// Co-polarised transmission through the PBS–QWP arrangement of the bare
/// cavity, |1 − t₊ − t₋|², with the laser detuning measured from the mode
/// midpoint.
pub fn copolarized_cavity_transmission(kappa: f64, lambda_split: f64, laser_detuning: f64) -> Result<f64> {
    check_kappa(kappa, lambda_split, laser_detuning)?;
    let t_plus = mode(kappa, laser_detuning + 0.5 * lambda_split);
    let t_minus = mode(kappa, laser_detuning - 0.5 * lambda_split);
    Ok((Complex64::new(1.0, 0.0) - t_plus - t_minus).norm_sqr())
}

/// Two intensity Lorentzians of common FWHM κ split by Λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleLorentzian {
    pub kappa: f64,
    pub lambda_split: f64,
    pub amp_h: f64,
    pub amp_v: f64,
    pub center: f64,
}

impl DoubleLorentzian {
    pub fn eval(&self, detuning: f64) -> f64 {
        double_lorentzian(self, detuning)
    }

    /// Starting point read off a measured trace: the peak gives the
    /// amplitude and centre, the half-maximum span the width.
    pub fn guess_from(spectrum: &Spectrum) -> Self {
        let (mut peak_x, mut peak) = (0.0, f64::NEG_INFINITY);
        for (x, y) in spectrum.iter() {
            if y > peak {
                peak = y;
                peak_x = x;
            }
        }
        let above: Vec<f64> = spectrum
            .iter()
            .filter(|(_, y)| *y >= 0.5 * peak)
            .map(|(x, _)| x)
            .collect();
        let span = above.last().unwrap_or(&peak_x) - above.first().unwrap_or(&peak_x);
        let grid = spectrum.detunings();
        let step = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
        let width = span.max(2.0 * step);
        Self {
            kappa: width * 0.8,
            lambda_split: width * 0.3,
            amp_h: peak,
            amp_v: peak,
            center: peak_x,
        }
    }
}

pub fn double_lorentzian(p: &DoubleLorentzian, detuning: f64) -> f64 {
    let lorentz = |x0: f64| 1.0 / (1.0 + (2.0 * (detuning - x0) / p.kappa).powi(2));
    p.amp_h * lorentz(p.center + 0.5 * p.lambda_split) + p.amp_v * lorentz(p.center - 0.5 * p.lambda_split)
}

/// Least-squares fit of [`double_lorentzian`] to a cavity spectrum. Returns
/// `kappa`, `lambda_split`, `amp_h`, `amp_v`, `center`; κ is reported
/// positive and Λ non-negative (H is the upper mode).
pub fn fit_double_lorentzian(spectrum: &Spectrum, guess: &DoubleLorentzian) -> Result<FitResult> {
    if spectrum.len() < 10 {
        return Err(Error::BadSpectrum(format!(
            "double-Lorentzian fit needs at least 10 points, got {}",
            spectrum.len()
        )));
    }
    let ghz = 1.0 / ghz_to_rad(1.0);
    let freq = |name, initial| Param {
        name,
        kind: ParamKind::Frequency,
        initial,
        scale: ghz_to_rad(1.0),
        to_working: ghz,
    };
    let amp = |name, initial| Param {
        name,
        kind: ParamKind::Dimensionless,
        initial,
        scale: 1e-3,
        to_working: 1.0,
    };
    let params = [
        freq("kappa", guess.kappa),
        freq("lambda_split", guess.lambda_split),
        amp("amp_h", guess.amp_h),
        amp("amp_v", guess.amp_v),
        freq("center", guess.center),
    ];
    let xs: Vec<f64> = spectrum.detunings().iter().map(|x| x * ghz).collect();
    let ys = spectrum.values();
    let mut fit = least_squares(&params, |p| {
        let model = DoubleLorentzian {
            kappa: p[0],
            lambda_split: p[1],
            amp_h: p[2],
            amp_v: p[3],
            center: p[4],
        };
        xs.iter().zip(ys).map(|(&x, &y)| model.eval(x) - y).collect()
    })?;
    fit.values[0] = fit.values[0].abs();
    if fit.values[1] < 0.0 {
        fit.values[1] = -fit.values[1];
        fit.values.swap(2, 3);
        fit.standard_errors.swap(2, 3);
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{self, CavityParams, Direction, DriveField, EmitterParams, Handedness};
    use crate::units::{mhz_to_rad, nm_to_m};
    use proptest::prelude::*;

    #[test]
    fn copolarized_examples() {
        let k = ghz_to_rad(102.0);
        assert!((copolarized_cavity_transmission(k, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let t = copolarized_cavity_transmission(k, ghz_to_rad(29.0), 0.0).unwrap();
        let ratio: f64 = 29.0 / 102.0;
        assert!((t - (1.0 - 2.0 / (1.0 + ratio * ratio)).powi(2)).abs() < 1e-14);
        assert!((t - 0.72).abs() < 0.01);
        assert!((copolarized_cavity_transmission(k, ghz_to_rad(29.0), ghz_to_rad(1e8)).unwrap() - 1.0).abs() < 1e-9);
        assert!(copolarized_cavity_transmission(0.0, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn copolarized_equals_uncoupled_model(
            k in 10.0f64..300.0, split in -80.0f64..80.0, d in -500.0f64..500.0,
        ) {
            let cavity = CavityParams::split(ghz_to_rad(k), ghz_to_rad(split), 0.0, nm_to_m(945.0)).unwrap();
            let em = EmitterParams::new(mhz_to_rad(300.0), 0.0, Handedness::Right).unwrap();
            let drive = DriveField::weak(ghz_to_rad(d), Direction::Backward);
            let t = model::transmission_total(&cavity, &em, &drive).unwrap().t_total;
            let c = copolarized_cavity_transmission(ghz_to_rad(k), ghz_to_rad(split), ghz_to_rad(d)).unwrap();
            prop_assert!((t - c).abs() < 1e-13);
        }
    }

    fn synthetic(p: &DoubleLorentzian) -> Spectrum {
        let grid: Vec<f64> = (0..=200).map(|i| ghz_to_rad(-300.0 + 3.0 * i as f64)).collect();
        Spectrum::from_fn(grid, |x| Ok(p.eval(x))).unwrap()
    }

    #[test]
    fn noiseless_recovery() {
        let truth = DoubleLorentzian {
            kappa: ghz_to_rad(102.0),
            lambda_split: ghz_to_rad(29.0),
            amp_h: 0.6,
            amp_v: 0.45,
            center: ghz_to_rad(4.0),
        };
        let s = synthetic(&truth);
        let fit = fit_double_lorentzian(&s, &DoubleLorentzian::guess_from(&s)).unwrap();
        let rel = |name: &str, v: f64| (fit.value(name).unwrap() / v - 1.0).abs();
        assert!(rel("kappa", truth.kappa) < 1e-6, "{}", fit.report());
        assert!(rel("lambda_split", truth.lambda_split) < 1e-6, "{}", fit.report());
        assert!(rel("amp_h", truth.amp_h) < 1e-6);
        assert!(rel("amp_v", truth.amp_v) < 1e-6);
        assert!(rel("center", truth.center) < 1e-6);
        assert!(fit.converged && !fit.degenerate);
    }

    #[test]
    fn refit_at_solution_stays_put() {
        let truth = DoubleLorentzian {
            kappa: ghz_to_rad(102.0),
            lambda_split: ghz_to_rad(29.0),
            amp_h: 0.5,
            amp_v: 0.5,
            center: 0.0,
        };
        let s = synthetic(&truth);
        let fit = fit_double_lorentzian(&s, &truth).unwrap();
        for (v, t) in fit.values.iter().zip([truth.kappa, truth.lambda_split, 0.5, 0.5]) {
            assert!((v - t).abs() <= 1e-9 * t.abs());
        }
    }

    #[test]
    fn too_few_points() {
        let s = Spectrum::new((0..5).map(f64::from).collect(), vec![0.0; 5]).unwrap();
        let guess = DoubleLorentzian::guess_from(&s);
        assert!(matches!(fit_double_lorentzian(&s, &guess), Err(Error::BadSpectrum(_))));
    }

    #[test]
    fn single_mode_reports_small_splitting() {
        let truth = DoubleLorentzian {
            kappa: ghz_to_rad(102.0),
            lambda_split: 0.0,
            amp_h: 0.5,
            amp_v: 0.5,
            center: 0.0,
        };
        let s = synthetic(&truth);
        let fit = fit_double_lorentzian(&s, &DoubleLorentzian::guess_from(&s)).unwrap();
        let split = fit.value("lambda_split").unwrap();
        let err = fit.standard_error("lambda_split").unwrap();
        assert!(split < 1e-2 * truth.kappa || split <= 3.0 * err, "{}", fit.report());
    }
}
