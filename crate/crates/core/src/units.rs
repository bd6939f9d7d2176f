//! Unit conversions between SI angular rates and the `f = ω/2π` figures in
//! GHz, MHz or pW that configuration files and reports use.

use std::f64::consts::TAU;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

const GIGA: f64 = 1e9;
const MEGA: f64 = 1e6;
const PICO: f64 = 1e-12;
const NANO: f64 = 1e-9;

/// `ω/2π` in GHz to ω in rad/s.
pub fn ghz_to_rad(ghz: f64) -> f64 {
    ghz * GIGA * TAU
}

/// ω in rad/s to `ω/2π` in GHz.
pub fn rad_to_ghz(rad: f64) -> f64 {
    rad / TAU / GIGA
}

pub fn mhz_to_rad(mhz: f64) -> f64 {
    mhz * MEGA * TAU
}

pub fn rad_to_mhz(rad: f64) -> f64 {
    rad / TAU / MEGA
}

pub fn pw_to_w(pw: f64) -> f64 {
    pw * PICO
}

pub fn w_to_pw(w: f64) -> f64 {
    w / PICO
}

pub fn nm_to_m(nm: f64) -> f64 {
    nm * NANO
}

pub fn m_to_nm(m: f64) -> f64 {
    m / NANO
}

pub fn ns_to_s(ns: f64) -> f64 {
    ns * NANO
}

pub fn s_to_ns(s: f64) -> f64 {
    s / NANO
}

/// Angular optical frequency ω = 2πc/λ for a vacuum wavelength in metres.
pub fn angular_frequency(wavelength: f64) -> f64 {
    TAU * SPEED_OF_LIGHT / wavelength
}

/// Photon energy ħω in joules.
pub fn photon_energy(wavelength: f64) -> f64 {
    HBAR * angular_frequency(wavelength)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn photon_energy_at_945_nm() {
        // hc/λ with h = 6.62607015e-34 J s
        let expected = 6.626_070_15e-34 * SPEED_OF_LIGHT / 945e-9;
        assert!((photon_energy(nm_to_m(945.0)) / expected - 1.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn ghz_round_trip(x in -1e4f64..1e4) {
            let back = rad_to_ghz(ghz_to_rad(x));
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1e-300));
        }

        #[test]
        fn mhz_round_trip(x in -1e6f64..1e6) {
            let back = rad_to_mhz(mhz_to_rad(x));
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1e-300));
        }
    }
}
