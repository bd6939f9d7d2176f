use crate::contrast::{dip_contrast, golden_section_max};
use crate::error::Result;
use crate::model::{CavityParams, DriveField, EmitterParams};

/// Upper end of the coupling-efficiency search.
pub const BETA_SEARCH_MAX: f64 = 0.99;

/// β in [0, 0.99] maximising the dip contrast seen by `drive`, with every
/// other emitter property taken from `emitter_base`. Returns (β, contrast).
pub fn optimal_beta_for_contrast(
    cavity: &CavityParams,
    emitter_base: &EmitterParams,
    drive: &DriveField,
) -> Result<(f64, f64)> {
    let contrast =
        |beta: f64| -> Result<f64> { Ok(dip_contrast(cavity, &emitter_base.with_beta(beta)?, drive)?.contrast) };
    golden_section_max(contrast, 0.0, BETA_SEARCH_MAX, 1e-7)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Direction, Handedness};
    use crate::units::{ghz_to_rad, mhz_to_rad, nm_to_m};

    #[test]
    fn ideal_cavity_is_optimal_at_critical_coupling() {
        let cavity = CavityParams::degenerate(ghz_to_rad(102.0), nm_to_m(945.0)).unwrap();
        let em = EmitterParams::new(mhz_to_rad(300.0), 0.1, Handedness::Right).unwrap();
        let (beta, c) = optimal_beta_for_contrast(&cavity, &em, &DriveField::weak(0.0, Direction::Backward)).unwrap();
        assert!((beta - 0.5).abs() < 1e-6, "{beta}");
        assert!((c - 1.0).abs() < 1e-10, "{c}");
    }
}
