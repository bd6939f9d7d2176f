//! Closed-form steady state and transmission of the emitter-cavity system.
//!
//! Frequencies are measured from a common reference ω_ref (the bare emitter
//! line when `qd_detuning = 0`):
//!
//! * cavity mode H sits at ω_ref + `delta_h`, mode V at ω_ref + `delta_v`;
//! * the emitter sits at ω_ref + `qd_detuning`;
//! * the laser sits at ω_ref − `laser_detuning`, so that with an unshifted
//!   emitter `laser_detuning` is Δω = ω₀ − ω.
//!
//! The cavity modes are adiabatically eliminated (κ ≫ g). The emitter then
//! obeys optical Bloch equations with a complex, cavity-dressed decay rate,
//! which are solved exactly in steady state.

use num_complex::Complex64;

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::units;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Two linearly polarised modes of a one-sided cavity sharing one decay rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Energy decay rate κ through the top mirror (rad/s).
    pub kappa: f64,
    /// H-mode detuning from the reference frequency (rad/s).
    pub delta_h: f64,
    /// V-mode detuning from the reference frequency (rad/s).
    pub delta_v: f64,
    /// Vacuum wavelength (m), used for the power ↔ photon-flux conversion.
    pub wavelength: f64,
}

impl CavityParams {
    pub fn new(kappa: f64, delta_h: f64, delta_v: f64, wavelength: f64) -> Result<Self> {
        let cavity = Self {
            kappa,
            delta_h,
            delta_v,
            wavelength,
        };
        cavity.validate()?;
        Ok(cavity)
    }

    /// Modes split by `mode_splitting` (Λ = δ_H − δ_V) around a common centre
    /// `center_detuning`.
    pub fn split(kappa: f64, mode_splitting: f64, center_detuning: f64, wavelength: f64) -> Result<Self> {
        Self::new(
            kappa,
            center_detuning + 0.5 * mode_splitting,
            center_detuning - 0.5 * mode_splitting,
            wavelength,
        )
    }

    pub fn degenerate(kappa: f64, wavelength: f64) -> Result<Self> {
        Self::new(kappa, 0.0, 0.0, wavelength)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("kappa", self.kappa)?;
        ensure_finite("delta_h", self.delta_h)?;
        ensure_finite("delta_v", self.delta_v)?;
        ensure_finite("wavelength", self.wavelength)?;
        if self.kappa <= 0.0 {
            return Err(invalid("kappa", format!("must be positive, got {}", self.kappa)));
        }
        if self.wavelength <= 0.0 {
            return Err(invalid(
                "wavelength",
                format!("must be positive, got {}", self.wavelength),
            ));
        }
        Ok(())
    }

    /// Λ = δ_H − δ_V.
    pub fn mode_splitting(&self) -> f64 {
        self.delta_h - self.delta_v
    }

    pub fn center_detuning(&self) -> f64 {
        0.5 * (self.delta_h + self.delta_v)
    }

    /// Same modes rigidly shifted so that their midpoint sits at `center`.
    pub fn with_center_detuning(&self, center: f64) -> Self {
        let half = 0.5 * self.mode_splitting();
        Self {
            delta_h: center + half,
            delta_v: center - half,
            ..*self
        }
    }

    /// ħω at the configured wavelength (J).
    pub fn photon_energy(&self) -> f64 {
        units::photon_energy(self.wavelength)
    }
}

/// Handedness l of the circularly polarised emitter dipole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Handedness {
    /// l = +1
    Right,
    /// l = −1
    Left,
}

impl Handedness {
    pub fn sign(self) -> f64 {
        match self {
            Handedness::Right => 1.0,
            Handedness::Left => -1.0,
        }
    }

    pub fn from_sign(l: i32) -> Result<Self> {
        match l {
            1 => Ok(Handedness::Right),
            -1 => Ok(Handedness::Left),
            other => Err(invalid("handedness", format!("must be +1 or -1, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterParams {
    /// Decay rate γ into non-cavity modes (rad/s).
    pub gamma: f64,
    /// Single-mode Purcell factor F_p1 = 4g²/(κγ).
    pub purcell_fp1: f64,
    pub handedness: Handedness,
    /// Emitter detuning from the reference frequency (rad/s).
    pub qd_detuning: f64,
    /// FWHM of the Lorentzian spectral-fluctuation distribution (rad/s).
    pub delta_sf: f64,
}

impl EmitterParams {
    pub fn new(gamma: f64, purcell_fp1: f64, handedness: Handedness) -> Result<Self> {
        let emitter = Self {
            gamma,
            purcell_fp1,
            handedness,
            qd_detuning: 0.0,
            delta_sf: 0.0,
        };
        emitter.validate()?;
        Ok(emitter)
    }

    /// Emitter whose degenerate-cavity coupling efficiency is `beta`.
    pub fn from_beta(gamma: f64, beta: f64, handedness: Handedness) -> Result<Self> {
        Self::new(gamma, purcell_fp1_from_beta(beta)?, handedness)
    }

    pub fn with_qd_detuning(self, qd_detuning: f64) -> Self {
        Self { qd_detuning, ..self }
    }

    pub fn with_delta_sf(self, delta_sf: f64) -> Self {
        Self { delta_sf, ..self }
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Ok(Self {
            purcell_fp1: purcell_fp1_from_beta(beta)?,
            ..self
        })
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("gamma", self.gamma)?;
        ensure_finite("purcell_fp1", self.purcell_fp1)?;
        ensure_finite("qd_detuning", self.qd_detuning)?;
        ensure_finite("delta_sf", self.delta_sf)?;
        if self.gamma <= 0.0 {
            return Err(invalid("gamma", format!("must be positive, got {}", self.gamma)));
        }
        if self.purcell_fp1 < 0.0 {
            return Err(invalid(
                "purcell_fp1",
                format!("must be non-negative, got {}", self.purcell_fp1),
            ));
        }
        if self.delta_sf < 0.0 {
            return Err(invalid(
                "delta_sf",
                format!("must be non-negative, got {}", self.delta_sf),
            ));
        }
        Ok(())
    }

    /// Total Purcell factor F_p = 2 F_p1 (both modes contribute).
    pub fn purcell(&self) -> f64 {
        2.0 * self.purcell_fp1
    }

    /// β = F_p / (F_p + 1).
    pub fn beta(&self) -> f64 {
        let fp = self.purcell();
        fp / (fp + 1.0)
    }

    /// Γ₁ = 4g²/κ = F_p1 γ, the decay rate into one mode.
    pub fn gamma_single_mode(&self) -> f64 {
        self.purcell_fp1 * self.gamma
    }

    /// Γ = F_p γ, the decay rate into a degenerate cavity.
    pub fn gamma_cavity(&self) -> f64 {
        self.purcell() * self.gamma
    }

    /// Γ_tot = Γ + γ = (1 + F_p) γ.
    pub fn gamma_total(&self) -> f64 {
        self.gamma_cavity() + self.gamma
    }

    /// Coupling constant g = √(F_p1 κ γ) / 2 for a given cavity.
    pub fn coupling(&self, cavity: &CavityParams) -> f64 {
        (self.purcell_fp1 * cavity.kappa * self.gamma).sqrt() / 2.0
    }
}

/// F_p1 for a requested β (F_p = β/(1−β), F_p1 = F_p/2).
pub fn purcell_fp1_from_beta(beta: f64) -> Result<f64> {
    ensure_finite("beta", beta)?;
    if !(0.0..1.0).contains(&beta) {
        return Err(invalid("beta", format!("must lie in [0, 1), got {beta}")));
    }
    Ok(0.5 * beta / (1.0 - beta))
}

/// Which way light crosses the diode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Port 1 → 2; mapped onto the field that does not match a right-handed
    /// dipole.
    Forward,
    /// Port 2 → 1; mapped onto the field that matches a right-handed dipole.
    Backward,
}

impl Direction {
    /// Effective l seen by an emitter with the given dipole handedness.
    pub fn effective_handedness(self, dipole: Handedness) -> f64 {
        match self {
            Direction::Backward => dipole.sign(),
            Direction::Forward => -dipole.sign(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveField {
    /// Δω at zero emitter shift, i.e. ω_ref − ω_laser (rad/s).
    pub laser_detuning: f64,
    /// Optical power at the cavity input (W).
    pub power: f64,
    pub direction: Direction,
}

impl DriveField {
    pub fn new(laser_detuning: f64, power: f64, direction: Direction) -> Result<Self> {
        let drive = Self {
            laser_detuning,
            power,
            direction,
        };
        drive.validate()?;
        Ok(drive)
    }

    /// Vanishing power, i.e. the single-photon (linear) limit.
    pub fn weak(laser_detuning: f64, direction: Direction) -> Self {
        Self {
            laser_detuning,
            power: 0.0,
            direction,
        }
    }

    pub fn with_power(self, power: f64) -> Self {
        Self { power, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("laser_detuning", self.laser_detuning)?;
        ensure_finite("power", self.power)?;
        if self.power < 0.0 {
            return Err(invalid("power", format!("must be non-negative, got {}", self.power)));
        }
        Ok(())
    }

    /// |b_in|² in photons per second.
    pub fn photon_flux(&self, cavity: &CavityParams) -> f64 {
        self.power / cavity.photon_energy()
    }
}

/// Emitter expectation values ⟨σ₋⟩ and ⟨σ_z⟩ in the laser frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub s_minus: Complex64,
    pub s_z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionResult {
    /// Coherent amplitude t = ⟨b_out⟩ / b_in.
    pub t_amplitude: Complex64,
    /// |t|².
    pub t_coherent: f64,
    /// Incoherently scattered power over all channels, normalised to the
    /// input flux.
    pub p_incoh_fraction: f64,
    /// Share of the incoherent emission that leaves through the transmitted
    /// port. Equals β for a degenerate cavity and a matched dipole.
    pub routing_fraction: f64,
    /// Coherent plus routed incoherent transmission.
    pub t_total: f64,
}

/// Complex Lorentzian responses (t_H, t_V) of the two modes at the laser
/// frequency, t = (1 + 2i(Δω + δ)/κ)⁻¹.
pub fn cavity_mode_response(cavity: &CavityParams, laser_detuning: f64) -> Result<(Complex64, Complex64)> {
    cavity.validate()?;
    ensure_finite("laser_detuning", laser_detuning)?;
    Ok(mode_response_unchecked(cavity, laser_detuning))
}

fn mode_response_unchecked(cavity: &CavityParams, laser_detuning: f64) -> (Complex64, Complex64) {
    let lorentz = |delta: f64| (Complex64::new(1.0, 2.0 * (laser_detuning + delta) / cavity.kappa)).inv();
    (lorentz(cavity.delta_h), lorentz(cavity.delta_v))
}

/// Everything the closed forms need, evaluated once per operating point.
#[derive(Debug, Clone, Copy)]
struct Operating {
    mode_sum: Complex64,
    /// t_H + l t_V: overlap between the driven field and the dipole.
    overlap: Complex64,
    /// Γ₁/2.
    half_gamma1: f64,
    /// iΔω + (Γ₁/2)(t_H + t_V) + γ/2, the complex emitter decay.
    denom: Complex64,
    flux: f64,
    /// |b_in|² / P'_c with P'_c the half-saturation photon flux.
    saturation: f64,
}

impl Operating {
    fn new(cavity: &CavityParams, emitter: &EmitterParams, drive: &DriveField) -> Result<Self> {
        cavity.validate()?;
        emitter.validate()?;
        drive.validate()?;
        let (t_h, t_v) = mode_response_unchecked(cavity, drive.laser_detuning);
        let l = drive.direction.effective_handedness(emitter.handedness);
        let mode_sum = t_h + t_v;
        let overlap = t_h + t_v * l;
        let half_gamma1 = 0.5 * emitter.gamma_single_mode();
        let delta_omega = emitter.qd_detuning + drive.laser_detuning;
        let denom = I * delta_omega + mode_sum * half_gamma1 + 0.5 * emitter.gamma;
        let flux = drive.photon_flux(cavity);
        let coupling = 2.0 * half_gamma1 * overlap.norm_sqr();
        let saturation = if coupling > 0.0 {
            flux * coupling / denom.norm_sqr()
        } else {
            0.0
        };
        Ok(Self {
            mode_sum,
            overlap,
            half_gamma1,
            denom,
            flux,
            saturation,
        })
    }

    /// Π = 1/(1 + |b_in|²/P'_c).
    fn pi(&self) -> f64 {
        1.0 / (1.0 + self.saturation)
    }

    /// (Γ₁/2)(t_H + l t_V)² / D, the emitter's linear-response contribution.
    fn emitter_term(&self) -> Complex64 {
        if self.half_gamma1 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.overlap * self.overlap * self.half_gamma1 / self.denom
    }

    fn amplitude(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.mode_sum + self.emitter_term() * self.pi()
    }

    fn steady_state(&self) -> SteadyState {
        let pi = self.pi();
        let s_minus = if self.half_gamma1 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            I * self.flux.sqrt() * self.half_gamma1.sqrt() * pi * self.overlap / self.denom
        };
        SteadyState {
            s_minus,
            s_z: -0.5 * pi,
        }
    }
}

/// Emitter steady state ⟨σ₋⟩, ⟨σ_z⟩ under a coherent drive.
pub fn steady_state(cavity: &CavityParams, emitter: &EmitterParams, drive: &DriveField) -> Result<SteadyState> {
    Ok(Operating::new(cavity, emitter, drive)?.steady_state())
}

/// Half-saturation photon flux P'_c (photons/s) at this operating point;
/// infinite when the drive does not reach the dipole.
pub fn saturation_flux(cavity: &CavityParams, emitter: &EmitterParams, drive: &DriveField) -> Result<f64> {
    let op = Operating::new(cavity, emitter, &drive.with_power(0.0))?;
    let coupling = 2.0 * op.half_gamma1 * op.overlap.norm_sqr();
    Ok(if coupling > 0.0 {
        op.denom.norm_sqr() / coupling
    } else {
        f64::INFINITY
    })
}

/// Critical power P_c = Γ/(8β²) · ħω for a resonant drive and a degenerate
/// cavity (W).
pub fn critical_power(cavity: &CavityParams, emitter: &EmitterParams) -> Result<f64> {
    cavity.validate()?;
    emitter.validate()?;
    let beta = emitter.beta();
    if beta == 0.0 {
        return Err(Error::NoCoupling);
    }
    Ok(emitter.gamma_cavity() / (8.0 * beta * beta) * cavity.photon_energy())
}

/// Mean number of photons arriving per emitter lifetime, P/(ħω) / (Γ + γ).
pub fn mean_photon_number(cavity: &CavityParams, emitter: &EmitterParams, power: f64) -> Result<f64> {
    cavity.validate()?;
    emitter.validate()?;
    ensure_finite("power", power)?;
    Ok(power / cavity.photon_energy() / emitter.gamma_total())
}

/// Coherent transmission amplitude t = ⟨b_out⟩/b_in.
pub fn transmission_amplitude(cavity: &CavityParams, emitter: &EmitterParams, drive: &DriveField) -> Result<Complex64> {
    Ok(Operating::new(cavity, emitter, drive)?.amplitude())
}

/// Coherent and incoherent transmission into the output port.
///
/// The incoherent part is the emitter's incoherent emission,
/// Re(2D)·(P_e − |⟨σ₋⟩|²), which equals the input power minus every coherent
/// output (transmitted, cross-polarised and leaky). It is routed to the
/// output port with weight (Γ₁/2)|t_H + l t_V|² / Re(2D). Both factors are
/// evaluated in closed form, so the zero-power limit is exact.
pub fn transmission_total(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    drive: &DriveField,
) -> Result<TransmissionResult> {
    let op = Operating::new(cavity, emitter, drive)?;
    let t = op.amplitude();
    let t_coherent = t.norm_sqr();
    let pi = op.pi();
    let total_rate = 2.0 * op.denom.re;
    let (p_incoh_fraction, routing_fraction) = if op.half_gamma1 == 0.0 || op.flux == 0.0 {
        let routing = if op.half_gamma1 == 0.0 {
            0.0
        } else {
            op.half_gamma1 * op.overlap.norm_sqr() / total_rate
        };
        (0.0, routing)
    } else {
        // P_e − |S₋|² = x²Π²/2 with x = |b_in|²/P'_c
        let incoherent_population = 0.5 * op.saturation * op.saturation * pi * pi;
        (
            total_rate * incoherent_population / op.flux,
            op.half_gamma1 * op.overlap.norm_sqr() / total_rate,
        )
    };
    Ok(TransmissionResult {
        t_amplitude: t,
        t_coherent,
        p_incoh_fraction,
        routing_fraction,
        t_total: t_coherent + routing_fraction * p_incoh_fraction,
    })
}

/// Cavity-induced shift of the emitter line, −(Γ₁/2)·Im(t_H + t_V), in the
/// same sign convention as `qd_detuning` (the dip sits at
/// `qd_detuning = lamb_shift − laser_detuning`).
pub fn lamb_shift(cavity: &CavityParams, emitter: &EmitterParams, laser_detuning: f64) -> Result<f64> {
    let (t_h, t_v) = cavity_mode_response(cavity, laser_detuning)?;
    emitter.validate()?;
    Ok(-0.5 * emitter.gamma_single_mode() * (t_h + t_v).im)
}

/// Coupling efficiency of an emitter displaced by `r` from the centre of a
/// Gaussian cavity mode of intensity waist `mode_waist`:
/// F_p(r) = F_p(0)·exp(−2r²/w²), β = F_p/(F_p + 1).
pub fn beta_at_position(beta_center: f64, r: f64, mode_waist: f64) -> Result<f64> {
    ensure_finite("beta_center", beta_center)?;
    ensure_finite("r", r)?;
    ensure_finite("mode_waist", mode_waist)?;
    if !(0.0..1.0).contains(&beta_center) {
        return Err(invalid("beta_center", format!("must lie in [0, 1), got {beta_center}")));
    }
    if mode_waist <= 0.0 {
        return Err(invalid("mode_waist", format!("must be positive, got {mode_waist}")));
    }
    if r < 0.0 {
        return Err(invalid("r", format!("must be non-negative, got {r}")));
    }
    let fp = beta_center / (1.0 - beta_center) * (-2.0 * (r / mode_waist).powi(2)).exp();
    Ok(fp / (fp + 1.0))
}
