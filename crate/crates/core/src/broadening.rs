//! Lorentzian spectral-fluctuation averaging.
//!
//! Slow jitter of the emitter frequency is modelled as a Lorentzian
//! distribution of FWHM δ_sf, and a measured curve is the convolution
//!
//! ```text
//! T_end(x) = ∫ T(x + σ) · (δ/2π) / (σ² + δ²/4) dσ.
//! ```
//!
//! Substituting σ = (δ/2)·tan θ maps the heavy Lorentzian wings onto a finite
//! interval with unit weight, T_end(x) = (1/π) ∫_{−π/2}^{π/2} T(x + (δ/2) tan θ) dθ,
//! so no truncation or tail correction is needed. Features of T narrower than
//! δ are passed in as hints and become breakpoints of the θ integral.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::model::{self, CavityParams, DriveField, EmitterParams};

/// Absolute error target for a broadened transmission value.
pub const DEFAULT_TOLERANCE: f64 = 1e-11;

/// A narrow structure of the curve being averaged: centre and width, both in
/// the detuning units of the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub center: f64,
    pub width: f64,
}

/// A sampled curve T(Δ) on a strictly increasing detuning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    detunings: Vec<f64>,
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(detunings: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if detunings.len() != values.len() {
            return Err(Error::BadSpectrum(format!(
                "{} detunings but {} values",
                detunings.len(),
                values.len()
            )));
        }
        if detunings.len() < 2 {
            return Err(Error::BadSpectrum("need at least two samples".into()));
        }
        if let Some(bad) = detunings.iter().chain(&values).find(|v| !v.is_finite()) {
            return Err(Error::BadSpectrum(format!("non-finite sample {bad}")));
        }
        if let Some(w) = detunings.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::BadSpectrum(format!(
                "detunings must increase strictly ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { detunings, values })
    }

    /// Samples `f` on `detunings`.
    pub fn from_fn(detunings: Vec<f64>, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        let values = detunings.iter().map(|&d| f(d)).collect::<Result<Vec<_>>>()?;
        Self::new(detunings, values)
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.detunings.iter().copied().zip(self.values.iter().copied())
    }

    /// Piecewise-linear interpolation, held constant beyond the grid.
    pub fn interpolate(&self, x: f64) -> f64 {
        let d = &self.detunings;
        let n = d.len();
        if x <= d[0] {
            return self.values[0];
        }
        if x >= d[n - 1] {
            return self.values[n - 1];
        }
        let i = d.partition_point(|&v| v <= x) - 1;
        let f = (x - d[i]) / (d[i + 1] - d[i]);
        self.values[i] + f * (self.values[i + 1] - self.values[i])
    }

    /// The sampled curve, interpolated, convolved and resampled on its own
    /// grid. The interpolant is piecewise linear and held flat beyond the
    /// ends, so each segment integrates in closed form.
    pub fn broadened(&self, delta_sf: f64) -> Result<Self> {
        ensure_finite("delta_sf", delta_sf)?;
        if delta_sf < 0.0 {
            return Err(invalid("delta_sf", format!("must be non-negative, got {delta_sf}")));
        }
        if delta_sf == 0.0 {
            return Ok(self.clone());
        }
        let h = 0.5 * delta_sf;
        let (d, v) = (&self.detunings, &self.values);
        let n = d.len();
        let values = d
            .iter()
            .map(|&x0| {
                let angle = |x: f64| ((x - x0) / h).atan();
                let mut acc = v[0] * (angle(d[0]) + FRAC_PI_2) + v[n - 1] * (FRAC_PI_2 - angle(d[n - 1]));
                for i in 0..n - 1 {
                    let slope = (v[i + 1] - v[i]) / (d[i + 1] - d[i]);
                    let (u0, u1) = (d[i] - x0, d[i + 1] - x0);
                    let offset = v[i] - slope * u0;
                    acc += offset * (angle(d[i + 1]) - angle(d[i]));
                    acc += 0.5 * slope * h * ((u1 * u1 + h * h) / (u0 * u0 + h * h)).ln();
                }
                acc / PI
            })
            .collect();
        Self::new(self.detunings.clone(), values)
    }
}

/// Lorentzian average of `curve` around `qd_detuning` with FWHM `delta_sf`.
pub fn broaden(curve: impl Fn(f64) -> f64, qd_detuning: f64, delta_sf: f64) -> Result<f64> {
    broaden_with_features(curve, qd_detuning, delta_sf, &[], DEFAULT_TOLERANCE)
}

/// As [`broaden`], with narrow features of the curve supplied so the
/// integration resolves them.
pub fn broaden_with_features(
    curve: impl Fn(f64) -> f64,
    qd_detuning: f64,
    delta_sf: f64,
    features: &[Feature],
    tolerance: f64,
) -> Result<f64> {
    ensure_finite("qd_detuning", qd_detuning)?;
    ensure_finite("delta_sf", delta_sf)?;
    if delta_sf < 0.0 {
        return Err(invalid("delta_sf", format!("must be non-negative, got {delta_sf}")));
    }
    if delta_sf == 0.0 {
        return Ok(curve(qd_detuning));
    }
    let half = 0.5 * delta_sf;
    let angle = |x: f64| ((x - qd_detuning) / half).atan();

    let mut cuts = vec![-FRAC_PI_2, FRAC_PI_2];
    for f in features {
        if !(f.center.is_finite() && f.width.is_finite() && f.width > 0.0) {
            continue;
        }
        for k in [-20.0, -3.0, -1.0, 0.0, 1.0, 3.0, 20.0] {
            cuts.push(angle(f.center + k * f.width));
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let integrand = |theta: f64| curve(qd_detuning + half * theta.tan());
    let target = tolerance * PI / (cuts.len() - 1) as f64;
    let mut total = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0usize;
    for w in cuts.windows(2) {
        let out = quadrature::double_exponential::integrate(integrand, w[0], w[1], target);
        total += out.integral;
        error += out.error_estimate;
        evaluations += out.num_function_evaluations as usize;
    }
    if !total.is_finite() || error > 10.0 * tolerance * PI {
        return Err(Error::Quadrature {
            error: error / PI,
            evaluations,
        });
    }
    Ok(total / PI)
}

/// Narrow features of the emitter response for a given operating point: the
/// cavity-shifted resonance with its Purcell- and power-broadened width.
pub fn emitter_features(cavity: &CavityParams, emitter: &EmitterParams, drive: &DriveField) -> Result<Vec<Feature>> {
    let shift = model::lamb_shift(cavity, emitter, drive.laser_detuning)?;
    let (t_h, t_v) = model::cavity_mode_response(cavity, drive.laser_detuning)?;
    let linear = emitter.gamma_single_mode() * (t_h + t_v).re + emitter.gamma;
    let pc = match model::critical_power(cavity, emitter) {
        Ok(pc) => pc,
        Err(Error::NoCoupling) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let power_broadened = linear * (1.0 + drive.power / pc).sqrt();
    Ok(vec![
        Feature {
            center: shift - drive.laser_detuning,
            width: linear,
        },
        Feature {
            center: shift - drive.laser_detuning,
            width: power_broadened,
        },
    ])
}

/// Total transmission averaged over the emitter's spectral fluctuations
/// (FWHM `emitter.delta_sf`) at the emitter's nominal detuning.
pub fn broadened_transmission(cavity: &CavityParams, emitter: &EmitterParams, drive: &DriveField) -> Result<f64> {
    broadened_transmission_tol(cavity, emitter, drive, DEFAULT_TOLERANCE)
}

pub fn broadened_transmission_tol(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    drive: &DriveField,
    tolerance: f64,
) -> Result<f64> {
    // Validate once so the integrand cannot fail.
    let centre = model::transmission_total(cavity, emitter, drive)?.t_total;
    if emitter.delta_sf == 0.0 {
        return Ok(centre);
    }
    let features = emitter_features(cavity, emitter, drive)?;
    let curve = |qd: f64| {
        model::transmission_total(cavity, &emitter.with_qd_detuning(qd), drive)
            .map(|r| r.t_total)
            .unwrap_or(f64::NAN)
    };
    broaden_with_features(curve, emitter.qd_detuning, emitter.delta_sf, &features, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Direction, Handedness};
    use crate::units::{ghz_to_rad, mhz_to_rad, nm_to_m};
    use proptest::prelude::*;

    fn lorentzian(center: f64, fwhm: f64) -> impl Fn(f64) -> f64 {
        move |x| 1.0 / (1.0 + (2.0 * (x - center) / fwhm).powi(2))
    }

    #[test]
    fn zero_width_is_identity() {
        let f = |x: f64| (3.0 * x).sin() + x * x;
        for x in [-2.0, 0.0, 0.7] {
            assert_eq!(broaden(f, x, 0.0).unwrap(), f(x));
        }
    }

    #[test]
    fn constant_is_preserved() {
        for w in [1e-3, 1.0, 1e6] {
            let v = broaden(|_| 0.37, 1.5, w).unwrap();
            assert!((v - 0.37).abs() < 1e-13, "{v}");
        }
    }

    #[test]
    fn lorentzian_convolution_is_lorentzian() {
        // Widths add and the peak drops by Γ/(Γ + δ).
        let gamma = 1.3;
        for delta in [0.01, 0.2, 1.0, 7.0] {
            for x in [0.0, 0.4, -2.5, 30.0] {
                let features = [Feature {
                    center: 0.0,
                    width: gamma,
                }];
                let got = broaden_with_features(lorentzian(0.0, gamma), x, delta, &features, 1e-12).unwrap();
                let expected = gamma / (gamma + delta) * lorentzian(0.0, gamma + delta)(x);
                assert!((got - expected).abs() < 1e-10, "δ={delta} x={x}: {got} vs {expected}");
            }
        }
    }

    #[test]
    fn narrow_feature_under_wide_jitter() {
        // A line 10⁻⁴ of the jitter width is found only with the hint.
        let gamma = 1e-4;
        let features = [Feature {
            center: 0.3,
            width: gamma,
        }];
        let got = broaden_with_features(lorentzian(0.3, gamma), 0.0, 1.0, &features, 1e-13).unwrap();
        let expected = gamma / (gamma + 1.0) * lorentzian(0.3, gamma + 1.0)(0.0);
        assert!((got / expected - 1.0).abs() < 1e-8, "{got} vs {expected}");
    }

    #[test]
    fn rejects_negative_width() {
        assert!(broaden(|x| x, 0.0, -1.0).is_err());
        assert!(broaden(|x| x, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn non_finite_curve_reports_quadrature_error() {
        let r = broaden(|x| if x > 0.0 { f64::NAN } else { 1.0 }, 0.0, 1.0);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn spectrum_validation() {
        assert!(Spectrum::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Spectrum::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Spectrum::new(vec![0.0, 1.0], vec![f64::NAN, 1.0]).is_err());
        let s = Spectrum::new(vec![0.0, 1.0, 3.0], vec![1.0, 3.0, 0.0]).unwrap();
        assert_eq!(s.interpolate(-1.0), 1.0);
        assert_eq!(s.interpolate(0.5), 2.0);
        assert_eq!(s.interpolate(2.0), 1.5);
        assert_eq!(s.interpolate(9.0), 0.0);
    }

    #[test]
    fn sampled_spectrum_broadening_matches_direct() {
        let grid: Vec<f64> = (0..=4000).map(|i| -20.0 + 0.01 * i as f64).collect();
        let s = Spectrum::from_fn(grid, |x| Ok(lorentzian(0.0, 1.0)(x))).unwrap();
        let b = s.broadened(0.5).unwrap();
        let mid = b.interpolate(0.0);
        // Peak of the exact convolution minus the ends held flat beyond ±20.
        assert!((mid - 1.0 / 1.5).abs() < 2e-3, "{mid}");
    }

    #[test]
    fn sampled_broadening_agrees_with_quadrature_of_interpolant() {
        let grid: Vec<f64> = (0..=40)
            .map(|i| -4.0 + 0.2 * i as f64 + 0.01 * (i % 3) as f64)
            .collect();
        let s = Spectrum::from_fn(grid, |x| Ok((x * 1.3).sin() + 0.2 * x)).unwrap();
        let b = s.broadened(0.7).unwrap();
        let hints: Vec<Feature> = s
            .detunings()
            .iter()
            .map(|&c| Feature { center: c, width: 0.05 })
            .collect();
        for (x, y) in b.iter() {
            let q = broaden_with_features(|t| s.interpolate(t), x, 0.7, &hints, 1e-12).unwrap();
            assert!((y - q).abs() < 1e-9, "{x}: {y} vs {q}");
        }
        assert_eq!(s.broadened(0.0).unwrap(), s);
        assert!(s.broadened(-1.0).is_err());
    }

    fn reference_point(beta: f64, direction: Direction, sf_mhz: f64) -> (CavityParams, EmitterParams, DriveField) {
        let cavity = CavityParams::split(ghz_to_rad(102.0), ghz_to_rad(29.0), 0.0, nm_to_m(945.0)).unwrap();
        let emitter = EmitterParams::from_beta(mhz_to_rad(300.0), beta, Handedness::Right)
            .unwrap()
            .with_delta_sf(mhz_to_rad(sf_mhz));
        (cavity, emitter, DriveField::weak(0.0, direction))
    }

    #[test]
    fn fluctuations_lift_the_backward_floor() {
        let (c, e, d) = reference_point(0.5, Direction::Backward, 0.0);
        let sharp = broadened_transmission(&c, &e, &d).unwrap();
        let (c, e, d) = reference_point(0.5, Direction::Backward, 40.0);
        let soft = broadened_transmission(&c, &e, &d).unwrap();
        assert!(soft > sharp && soft < 0.2, "{sharp} {soft}");
    }

    #[test]
    fn tighter_tolerance_does_not_move_result() {
        let (c, e, d) = reference_point(0.72, Direction::Backward, 40.0);
        let a = broadened_transmission_tol(&c, &e, &d, 1e-9).unwrap();
        let b = broadened_transmission_tol(&c, &e, &d, 1e-13).unwrap();
        assert!((a - b).abs() <= 1e-6 * b.abs(), "{a} {b}");
    }

    proptest! {
        #[test]
        fn output_within_curve_bounds(
            c in -3.0f64..3.0, w in 0.01f64..5.0, x in -10.0f64..10.0, d in 0.0f64..20.0,
            lo in -1.0f64..1.0, span in 0.0f64..2.0,
        ) {
            let f = |y: f64| lo + span * lorentzian(c, w)(y);
            let feats = [Feature { center: c, width: w }];
            let v = broaden_with_features(f, x, d, &feats, 1e-12).unwrap();
            prop_assert!(v >= lo - 1e-10 && v <= lo + span + 1e-10);
        }

        #[test]
        fn contrast_never_grows_with_jitter(beta in 0.1f64..0.9, d1 in 0.0f64..200.0, extra in 0.0f64..200.0) {
            let floor = |sf: f64| {
                let (c, e, d) = reference_point(beta, Direction::Backward, sf);
                broadened_transmission(&c, &e, &d).unwrap()
            };
            let far = {
                let (c, e, d) = reference_point(beta, Direction::Backward, 0.0);
                model::transmission_total(&c, &e.with_qd_detuning(ghz_to_rad(200.0)), &d).unwrap().t_total
            };
            let a = 1.0 - floor(d1) / far;
            let b = 1.0 - floor(d1 + extra) / far;
            prop_assert!(b <= a + 1e-9, "{a} {b}");
        }
    }
}
