use super::lsq::{least_squares, FitResult, Param, ParamKind};
use crate::error::{ensure_finite, invalid, Error, Result};
use crate::units::{pw_to_w, w_to_pw};

/// Fits T = (P/P_c)/(1 + P/P_c) to transmission measured on resonance
/// against input power (W). Returns `p_c`.
pub fn fit_critical_power(powers: &[f64], transmission: &[f64]) -> Result<FitResult> {
    if powers.len() != transmission.len() {
        return Err(invalid("transmission", "length differs from the power grid"));
    }
    if powers.len() < 3 {
        return Err(Error::BadSpectrum(format!(
            "saturation fit needs at least 3 points, got {}",
            powers.len()
        )));
    }
    for (&p, &t) in powers.iter().zip(transmission) {
        ensure_finite("power", p)?;
        ensure_finite("transmission", t)?;
        if p <= 0.0 {
            return Err(invalid("power", format!("must be positive, got {p}")));
        }
    }
    // Start from the power whose transmission is closest to one half.
    let initial = powers
        .iter()
        .zip(transmission)
        .min_by(|a, b| (a.1 - 0.5).abs().total_cmp(&(b.1 - 0.5).abs()))
        .map(|(&p, _)| p)
        .unwrap_or(powers[0]);
    let params = [Param {
        name: "p_c",
        kind: ParamKind::Power,
        initial,
        scale: pw_to_w(1e-3),
        to_working: w_to_pw(1.0),
    }];
    let ps: Vec<f64> = powers.iter().map(|&p| w_to_pw(p)).collect();
    let mut fit = least_squares(&params, |x| {
        let pc = x[0].abs();
        ps.iter()
            .zip(transmission)
            .map(|(&p, &t)| p / pc / (1.0 + p / pc) - t)
            .collect()
    })?;
    fit.values[0] = fit.values[0].abs();
    Ok(fit)
}
