//! Intensity correlation g²(τ) of the backward-transmitted light.
//!
//! The one-sided cavity is mapped onto the two-sided (Rice–Carmichael)
//! result through β_2S = 2β_1S; the correlation is then a closed form in the
//! two-sided Purcell factor F and the Rabi frequency Y (units of γ). The
//! delay is measured in lifetimes of the emitter in the real, one-sided
//! cavity, τ' = γ(1 + F_1S)τ.

use crate::error::{ensure_finite, invalid, Error, Result};

/// Below this |Ω²| the cosh/sinh pair is replaced by its Taylor series.
const SERIES_THRESHOLD: f64 = 1e-6;

/// F_2S from F_1S via 1/(1/F_2S + 1) = 2/(1/F_1S + 1).
pub fn purcell_1s_to_2s(f_p_1s: f64) -> Result<f64> {
    ensure_finite("f_p_1s", f_p_1s)?;
    if f_p_1s < 0.0 {
        return Err(invalid("f_p_1s", format!("must be non-negative, got {f_p_1s}")));
    }
    if f_p_1s >= 1.0 {
        return Err(Error::PurcellOutOfDomain(f_p_1s));
    }
    // β_2S = 2β_1S = 2F/(F+1); F_2S = β_2S/(1 − β_2S).
    Ok(2.0 * f_p_1s / (1.0 - f_p_1s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Params {
    pub f_p_1s: f64,
    /// Free-space decay rate γ (rad/s).
    pub gamma: f64,
    /// Rabi frequency in units of γ.
    pub rabi_y: f64,
}

impl G2Params {
    pub fn new(f_p_1s: f64, gamma: f64, rabi_y: f64) -> Result<Self> {
        let p = Self { f_p_1s, gamma, rabi_y };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        purcell_1s_to_2s(self.f_p_1s)?;
        ensure_finite("gamma", self.gamma)?;
        ensure_finite("rabi_y", self.rabi_y)?;
        if self.gamma <= 0.0 {
            return Err(invalid("gamma", format!("must be positive, got {}", self.gamma)));
        }
        if self.rabi_y < 0.0 {
            return Err(invalid("rabi_y", format!("must be non-negative, got {}", self.rabi_y)));
        }
        Ok(())
    }

    pub fn f_p_2s(&self) -> f64 {
        2.0 * self.f_p_1s / (1.0 - self.f_p_1s)
    }

    /// τ' for a delay in seconds, in units of the total one-sided decay
    /// rate γ(1 + F_1S).
    pub fn scaled_delay(&self, tau: f64) -> f64 {
        self.gamma * (1.0 + self.f_p_1s) * tau
    }
}

/// g²(τ') in the two-sided parametrisation. Symmetric in τ'.
///
/// g² − 1 = 2F²/(1+Y²)² · e^{−3τ'/4} [A cosh(Ωτ') + B sinh(Ωτ')/Ω] with
/// Ω² = (1 − 8Y²/(1+F)²)/16, A = Y² + F²/2 − 1 and
/// B = −(F³ + F² + 2F + 2 − 2(F + 5)Y²)/(8(1 + F)).
pub fn g2_scaled(f: f64, y: f64, tau_prime: f64) -> f64 {
    let t = tau_prime.abs();
    let y2 = y * y;
    let omega2 = (1.0 - 8.0 * y2 / ((1.0 + f) * (1.0 + f))) / 16.0;
    // cosh(Ωτ') and sinh(Ωτ')/Ω, continued to imaginary Ω.
    let (ch, sh) = if omega2.abs() * t * t < SERIES_THRESHOLD {
        let z = omega2 * t * t;
        (1.0 + z / 2.0 + z * z / 24.0, t * (1.0 + z / 6.0 + z * z / 120.0))
    } else if omega2 > 0.0 {
        let w = omega2.sqrt();
        ((w * t).cosh(), (w * t).sinh() / w)
    } else {
        let w = (-omega2).sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    };
    let prefactor = 2.0 * f * f / ((1.0 + y2) * (1.0 + y2));
    let a = y2 + 0.5 * f * f - 1.0;
    let b = -(f * f * f + f * f + 2.0 * f + 2.0 - 2.0 * (f + 5.0) * y2) / (8.0 * (1.0 + f));
    1.0 + prefactor * (-0.75 * t).exp() * (a * ch + b * sh)
}

/// Oscillation threshold: above this Rabi frequency g² rings.
pub fn oscillation_threshold(f: f64) -> f64 {
    (1.0 + f) / 8f64.sqrt()
}

/// Weak-drive limit (1 − F² e^{−τ'/2})².
pub fn g2_scaled_low_power(f: f64, tau_prime: f64) -> f64 {
    (1.0 - f * f * (-0.5 * tau_prime.abs()).exp()).powi(2)
}

/// g²(0) = 1 + 2F²(Y² + F²/2 − 1)/(1 + Y²)².
pub fn g2_zero(f: f64, y: f64) -> f64 {
    let y2 = y * y;
    1.0 + 2.0 * f * f * (y2 + 0.5 * f * f - 1.0) / ((1.0 + y2) * (1.0 + y2))
}

/// g²(τ) for a delay in seconds.
pub fn g2_tau(params: &G2Params, tau: f64) -> Result<f64> {
    params.validate()?;
    ensure_finite("tau", tau)?;
    Ok(g2_scaled(params.f_p_2s(), params.rabi_y, params.scaled_delay(tau)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct G2Curve {
    /// Delays (s).
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn g2_curve(params: &G2Params, taus: &[f64]) -> Result<G2Curve> {
    let values = taus.iter().map(|&t| g2_tau(params, t)).collect::<Result<Vec<_>>>()?;
    Ok(G2Curve {
        taus: taus.to_vec(),
        values,
    })
}

/// g²(0) over a grid of Rabi frequencies.
pub fn g2_zero_vs_power(f_p_2s: f64, ys: &[f64]) -> Result<Vec<f64>> {
    ensure_finite("f_p_2s", f_p_2s)?;
    ys.iter()
        .map(|&y| {
            ensure_finite("rabi_y", y)?;
            if y < 0.0 {
                return Err(invalid("rabi_y", format!("must be non-negative, got {y}")));
            }
            Ok(g2_zero(f_p_2s, y))
        })
        .collect()
}

/// Y² giving g²(0) = `target`; the largest non-negative root of
/// (g−1)u² + (2(g−1) − 2F²)u + (g−1) − F⁴ + 2F² = 0.
pub fn rabi_y2_for_g2_zero(f_p_2s: f64, target: f64) -> Result<f64> {
    ensure_finite("f_p_2s", f_p_2s)?;
    ensure_finite("target", target)?;
    let f2 = f_p_2s * f_p_2s;
    let g = target - 1.0;
    let a = g;
    let b = 2.0 * g - 2.0 * f2;
    let c = g - f2 * f2 + 2.0 * f2;
    let roots: Vec<f64> = if a == 0.0 {
        if b == 0.0 {
            vec![]
        } else {
            vec![-c / b]
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            vec![]
        } else {
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            let mut r = vec![q / a];
            if q != 0.0 {
                r.push(c / q);
            }
            r
        }
    };
    roots
        .into_iter()
        .filter(|u| u.is_finite() && *u >= 0.0)
        .fold(None, |acc: Option<f64>, u| Some(acc.map_or(u, |m| m.max(u))))
        .ok_or_else(|| {
            invalid(
                "target",
                format!("g2(0) = {target} is not reachable with F_2S = {f_p_2s}"),
            )
        })
}

/// Linear map from drive power to Y²: Y² = c_Y · P/P_c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCalibration {
    pub c_y: f64,
}

impl PowerCalibration {
    /// Reference point used for the measured bunching: 5 pW gives g²(0) = 101.
    pub const REFERENCE_POWER: f64 = 5e-12;
    pub const REFERENCE_G2: f64 = 101.0;

    /// Calibration that puts g²(0) = `target` at `power`.
    pub fn from_reference(power: f64, critical_power: f64, target: f64, f_p_2s: f64) -> Result<Self> {
        ensure_finite("power", power)?;
        ensure_finite("critical_power", critical_power)?;
        if power <= 0.0 || critical_power <= 0.0 {
            return Err(invalid("power", "reference and critical power must be positive"));
        }
        let y2 = rabi_y2_for_g2_zero(f_p_2s, target)?;
        Ok(Self {
            c_y: y2 * critical_power / power,
        })
    }

    /// Saturation-based mapping for a resonant ideal emitter:
    /// c_Y = (1 + F_2S)².
    pub fn physical(f_p_2s: f64) -> Self {
        Self {
            c_y: (1.0 + f_p_2s).powi(2),
        }
    }

    pub fn default_for(critical_power: f64, f_p_2s: f64) -> Result<Self> {
        Self::from_reference(Self::REFERENCE_POWER, critical_power, Self::REFERENCE_G2, f_p_2s)
    }

    pub fn rabi_y(&self, power: f64, critical_power: f64) -> f64 {
        (self.c_y * power / critical_power).max(0.0).sqrt()
    }
}

/// The forward-propagating field never meets the dipole and stays
/// coherent: g²(τ) = 1.
pub fn forward_g2(_tau: f64) -> f64 {
    1.0
}
