use chiral_core::broadening::{self, Spectrum};
use chiral_core::fitting::{fit_double_lorentzian, fit_qd_dip, DipFitOptions, DipGuess, DoubleLorentzian};
use chiral_core::model::{CavityParams, Direction, DriveField, EmitterParams, Handedness};
use chiral_core::units::{ghz_to_rad, mhz_to_rad, nm_to_m};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn truth() -> DoubleLorentzian {
    DoubleLorentzian {
        kappa: ghz_to_rad(102.0),
        lambda_split: ghz_to_rad(29.0),
        amp_h: 0.5,
        amp_v: 0.5,
        center: 0.0,
    }
}

fn noisy_spectrum(p: &DoubleLorentzian, seed: u64, noise: f64) -> Spectrum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let peak = p.amp_h.max(p.amp_v);
    let normal = Normal::new(0.0, noise * peak).unwrap();
    let grid: Vec<f64> = (0..=200).map(|i| ghz_to_rad(-300.0 + 3.0 * i as f64)).collect();
    let values = grid.iter().map(|&x| p.eval(x) + normal.sample(&mut rng)).collect();
    Spectrum::new(grid, values).unwrap()
}

#[test]
fn cavity_parameters_within_three_sigma_for_most_seeds() {
    let t = truth();
    let expected = [t.kappa, t.lambda_split, t.amp_h, t.amp_v, t.center];
    let mut hits = 0;
    for seed in 0..100 {
        let s = noisy_spectrum(&t, seed, 0.01);
        let fit = fit_double_lorentzian(&s, &DoubleLorentzian::guess_from(&s)).unwrap();
        let ok = fit
            .values
            .iter()
            .zip(&fit.standard_errors)
            .zip(expected)
            .all(|((v, e), x)| (v - x).abs() <= 3.0 * e);
        if ok {
            hits += 1;
        }
    }
    assert!(hits >= 95, "{hits}/100 seeds within 3 sigma");
}

#[test]
fn standard_errors_track_the_scatter() {
    // The reported κ error should match the spread over seeds to within 25%.
    let t = truth();
    let fits: Vec<(f64, f64)> = (0..60)
        .map(|seed| {
            let s = noisy_spectrum(&t, 1000 + seed, 0.01);
            let f = fit_double_lorentzian(&s, &DoubleLorentzian::guess_from(&s)).unwrap();
            (f.values[0], f.standard_errors[0])
        })
        .collect();
    let n = fits.len() as f64;
    let mean = fits.iter().map(|f| f.0).sum::<f64>() / n;
    let spread = (fits.iter().map(|f| (f.0 - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let reported = fits.iter().map(|f| f.1).sum::<f64>() / n;
    assert!(
        (spread / reported - 1.0).abs() < 0.25,
        "spread {spread} reported {reported}"
    );
}

#[test]
fn dip_fit_recovers_beta_and_jitter() {
    let cavity = CavityParams::split(ghz_to_rad(102.0), ghz_to_rad(29.0), 0.0, nm_to_m(945.0)).unwrap();
    let emitter = EmitterParams::from_beta(mhz_to_rad(300.0), 0.5, Handedness::Right)
        .unwrap()
        .with_delta_sf(mhz_to_rad(40.0));
    let drive = DriveField::weak(0.0, Direction::Backward);
    let grid: Vec<f64> = (0..=80).map(|i| ghz_to_rad(-4.0 + 0.1 * i as f64)).collect();
    let s = Spectrum::from_fn(grid, |qd| {
        broadening::broadened_transmission(&cavity, &emitter.with_qd_detuning(qd), &drive)
    })
    .unwrap();
    let options = DipFitOptions {
        drive,
        handedness: Handedness::Right,
        fit_gamma: false,
    };
    let guess = DipGuess {
        beta: 0.6,
        gamma: emitter.gamma,
        delta_sf: mhz_to_rad(100.0),
        qd_center: mhz_to_rad(-80.0),
    };
    let fit = fit_qd_dip(&s, &cavity, &guess, &options).unwrap();
    assert!(
        (fit.value("beta").unwrap() / 0.5 - 1.0).abs() < 1e-6,
        "{}",
        fit.report()
    );
    assert!(
        (fit.value("delta_sf").unwrap() / mhz_to_rad(40.0) - 1.0).abs() < 1e-6,
        "{}",
        fit.report()
    );
}

#[test]
fn free_linewidth_trades_against_jitter() {
    // Jitter on a near-Lorentzian dip mimics a change of linewidth, so with
    // γ free the fit lands on a neighbouring, equally good solution.
    let cavity = CavityParams::split(ghz_to_rad(102.0), ghz_to_rad(29.0), 0.0, nm_to_m(945.0)).unwrap();
    let emitter = EmitterParams::from_beta(mhz_to_rad(300.0), 0.72, Handedness::Right).unwrap();
    let drive = DriveField::weak(0.0, Direction::Backward);
    let grid: Vec<f64> = (0..=80).map(|i| ghz_to_rad(-4.0 + 0.1 * i as f64)).collect();
    let s = Spectrum::from_fn(grid, |qd| {
        broadening::broadened_transmission(&cavity, &emitter.with_qd_detuning(qd), &drive)
    })
    .unwrap();
    let options = DipFitOptions {
        drive,
        handedness: Handedness::Right,
        fit_gamma: true,
    };
    let guess = DipGuess {
        beta: 0.65,
        gamma: mhz_to_rad(250.0),
        delta_sf: mhz_to_rad(5.0),
        qd_center: 0.0,
    };
    let fit = fit_qd_dip(&s, &cavity, &guess, &options).unwrap();
    assert!(fit.residual_norm < 1e-9, "{}", fit.report());
    assert!((fit.value("beta").unwrap() - 0.72).abs() < 0.02, "{}", fit.report());
    assert!(
        (fit.value("gamma").unwrap() / mhz_to_rad(300.0) - 1.0).abs() < 0.01,
        "{}",
        fit.report()
    );
}
