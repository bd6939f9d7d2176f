//! Dip contrast and two-dimensional detuning maps.

use crate::broadening;
use crate::error::{ensure_finite, invalid, Result};
use crate::model::{self, CavityParams, DriveField, EmitterParams};

/// Distance, in units of Γ_tot, at which the off-resonant level is sampled.
pub const FAR_DETUNING_LINEWIDTHS: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipContrast {
    /// Emitter detuning of the dip extremum (rad/s).
    pub dip_detuning: f64,
    /// Transmission at the extremum.
    pub t_dip: f64,
    /// Mean transmission at ±50 Γ_tot from the resonance.
    pub t_far: f64,
    /// 1 − T⁰/T^∞.
    pub contrast: f64,
}

/// Emitter detuning at which the dip is centred for a laser at
/// `drive.laser_detuning`: the cavity pulls the line by the Lamb shift.
pub fn resonance_detuning(cavity: &CavityParams, emitter: &EmitterParams, drive: &DriveField) -> Result<f64> {
    Ok(model::lamb_shift(cavity, emitter, drive.laser_detuning)? - drive.laser_detuning)
}

/// Broadened transmission with the emitter tuned to `qd_detuning`.
pub fn transmission_at(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    drive: &DriveField,
    qd_detuning: f64,
) -> Result<f64> {
    broadening::broadened_transmission(cavity, &emitter.with_qd_detuning(qd_detuning), drive)
}

/// Contrast of the emitter feature in a transmission-vs-emitter-detuning
/// scan, 1 − T⁰/T^∞. T⁰ is the extremum of the broadened curve nearest the
/// cavity-shifted resonance, so peaks count as negative contrast.
pub fn dip_contrast(cavity: &CavityParams, emitter: &EmitterParams, drive: &DriveField) -> Result<DipContrast> {
    let centre = resonance_detuning(cavity, emitter, drive)?;
    let far = FAR_DETUNING_LINEWIDTHS * emitter.gamma_total();
    let t_far = 0.5
        * (transmission_at(cavity, emitter, drive, centre - far)?
            + transmission_at(cavity, emitter, drive, centre + far)?);

    let width = broadening::emitter_features(cavity, emitter, drive)?
        .iter()
        .map(|f| f.width)
        .fold(emitter.delta_sf, f64::max);
    let depth = |qd: f64| -> Result<f64> { Ok((transmission_at(cavity, emitter, drive, qd)? - t_far).abs()) };

    // Coarse scan, then golden-section refinement of the deepest bracket.
    let n = 40;
    let span = 4.0 * width;
    let step = 2.0 * span / n as f64;
    let mut best = (centre, depth(centre)?);
    for i in 0..=n {
        let qd = centre - span + step * i as f64;
        let d = depth(qd)?;
        if d > best.1 {
            best = (qd, d);
        }
    }
    let (qd, _) = golden_section_max(&depth, best.0 - step, best.0 + step, 1e-9 * width)?;
    let qd = if depth(qd)? >= best.1 { qd } else { best.0 };
    let t_dip = transmission_at(cavity, emitter, drive, qd)?;
    Ok(DipContrast {
        dip_detuning: qd,
        t_dip,
        t_far,
        contrast: 1.0 - t_dip / t_far,
    })
}

/// Maximises `f` on [a, b] by golden-section search; returns (x, f(x)).
pub fn golden_section_max(mut f: impl FnMut(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    ensure_finite("a", a)?;
    ensure_finite("b", b)?;
    if b < a {
        return Err(invalid("b", "interval must satisfy a <= b"));
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let tol = tol.max(f64::EPSILON * (a.abs() + b.abs()));
    for _ in 0..500 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc > fd { (c, fc) } else { (d, fd) })
}

/// Transmission over a grid of cavity-centre and emitter detunings with the
/// laser held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct DetuningMap {
    pub cavity_detunings: Vec<f64>,
    pub qd_detunings: Vec<f64>,
    /// Row-major, one row per cavity detuning.
    pub transmission: Vec<Vec<f64>>,
    /// Emitter resonance per row, including the cavity-induced shift.
    pub resonance: Vec<f64>,
}

fn check_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid(name, "grid is empty"));
    }
    for &v in grid {
        ensure_finite(name, v)?;
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(name, "grid must increase strictly"));
    }
    Ok(())
}

/// One row of [`detuning_map`]: the cavity centred at `cavity_detuning`.
pub fn detuning_map_row(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    drive: &DriveField,
    cavity_detuning: f64,
    qd_detunings: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let shifted = cavity.with_center_detuning(cavity_detuning);
    let row = qd_detunings
        .iter()
        .map(|&qd| transmission_at(&shifted, emitter, drive, qd))
        .collect::<Result<Vec<_>>>()?;
    Ok((row, resonance_detuning(&shifted, emitter, drive)?))
}

/// The cavity modes keep their splitting and are moved rigidly; the emitter
/// keeps its bare coupling, the cavity detuning enters only through the
/// mode responses at the laser frequency.
pub fn detuning_map(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    drive: &DriveField,
    cavity_detunings: &[f64],
    qd_detunings: &[f64],
) -> Result<DetuningMap> {
    check_grid("cavity_detunings", cavity_detunings)?;
    check_grid("qd_detunings", qd_detunings)?;
    let mut transmission = Vec::with_capacity(cavity_detunings.len());
    let mut resonance = Vec::with_capacity(cavity_detunings.len());
    for &dc in cavity_detunings {
        let (row, res) = detuning_map_row(cavity, emitter, drive, dc, qd_detunings)?;
        transmission.push(row);
        resonance.push(res);
    }
    Ok(DetuningMap {
        cavity_detunings: cavity_detunings.to_vec(),
        qd_detunings: qd_detunings.to_vec(),
        transmission,
        resonance,
    })
}

/// Dip contrast as a function of cavity detuning, for the strongest-contrast
/// search over a map.
pub fn contrast_vs_cavity_detuning(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    drive: &DriveField,
    cavity_detunings: &[f64],
) -> Result<Vec<DipContrast>> {
    check_grid("cavity_detunings", cavity_detunings)?;
    cavity_detunings
        .iter()
        .map(|&dc| dip_contrast(&cavity.with_center_detuning(dc), emitter, drive))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Direction, Handedness};
    use crate::units::{ghz_to_rad, mhz_to_rad, nm_to_m};

    fn cavity(split_ghz: f64) -> CavityParams {
        CavityParams::split(ghz_to_rad(102.0), ghz_to_rad(split_ghz), 0.0, nm_to_m(945.0)).unwrap()
    }

    fn emitter(beta: f64, sf_mhz: f64) -> EmitterParams {
        EmitterParams::from_beta(mhz_to_rad(300.0), beta, Handedness::Right)
            .unwrap()
            .with_delta_sf(mhz_to_rad(sf_mhz))
    }

    #[test]
    fn ideal_critical_coupling_has_full_contrast() {
        let c = dip_contrast(
            &cavity(0.0),
            &emitter(0.5, 0.0),
            &DriveField::weak(0.0, Direction::Backward),
        )
        .unwrap();
        // T is quadratic at the zero, so the location resolves to ~√ε·Γ.
        assert!(c.t_dip < 1e-14, "{c:?}");
        assert!((c.contrast - 1.0).abs() < 1e-12);
        assert!(c.dip_detuning.abs() < 1e-3 * mhz_to_rad(600.0));
    }

    #[test]
    fn ideal_contrast_closed_form() {
        // T⁰ = (1 − 2β)², T^∞ → 1 − O((Γ_tot/50Γ_tot)²)
        for beta in [0.2, 0.35, 0.7] {
            let c = dip_contrast(
                &cavity(0.0),
                &emitter(beta, 0.0),
                &DriveField::weak(0.0, Direction::Backward),
            )
            .unwrap();
            let far = c.t_far;
            assert!((far - 1.0).abs() < 2e-3, "{far}");
            assert!((c.t_dip - (1.0 - 2.0 * beta).powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_light_has_no_contrast() {
        let c = dip_contrast(
            &cavity(0.0),
            &emitter(0.5, 40.0),
            &DriveField::weak(0.0, Direction::Forward),
        )
        .unwrap();
        assert!(c.contrast.abs() < 1e-12);
    }

    #[test]
    fn uncoupled_map_is_bare_cavity() {
        let em = EmitterParams::new(mhz_to_rad(300.0), 0.0, Handedness::Right).unwrap();
        let cav: Vec<f64> = (-3..=3).map(|k| ghz_to_rad(20.0 * k as f64)).collect();
        let qd: Vec<f64> = (-5..=5).map(|k| ghz_to_rad(0.5 * k as f64)).collect();
        let map = detuning_map(
            &cavity(29.0),
            &em,
            &DriveField::weak(0.0, Direction::Backward),
            &cav,
            &qd,
        )
        .unwrap();
        for (row, &dc) in map.transmission.iter().zip(&cav) {
            let (th, tv) = model::cavity_mode_response(&cavity(29.0).with_center_detuning(dc), 0.0).unwrap();
            let bare = (num_complex::Complex64::new(1.0, 0.0) - th - tv).norm_sqr();
            for &t in row {
                assert!((t - bare).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn map_rejects_unordered_grid() {
        let r = detuning_map(
            &cavity(29.0),
            &emitter(0.5, 0.0),
            &DriveField::weak(0.0, Direction::Backward),
            &[1.0, 0.0],
            &[0.0],
        );
        assert!(r.is_err());
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| Ok(-(x - 0.3) * (x - 0.3) + 2.0), -1.0, 4.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-14);
    }
}
