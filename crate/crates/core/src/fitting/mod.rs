//! Least-squares estimators for cavity and emitter parameters, and the
//! coupling that maximises the transmission dip.

mod cavity;
mod dip;
mod lsq;
mod optimize;
mod saturation;
mod table;

pub use cavity::{copolarized_cavity_transmission, double_lorentzian, fit_double_lorentzian, DoubleLorentzian};
pub use dip::{fit_qd_dip, purcell_from_linewidth, DipFitOptions, DipGuess};
pub use lsq::{FitResult, ParamKind};
pub use optimize::{optimal_beta_for_contrast, BETA_SEARCH_MAX};
pub use saturation::fit_critical_power;
pub use table::{CavityTable, CavityTableRow};
