//! Steady-state input-output model of a chiral one-dimensional atom: a
//! two-level emitter coupled to the two orthogonally polarised modes of a
//! one-sided optical microcavity, probed through a polarising beam-splitter
//! and a quarter-wave plate.
//!
//! The crate is organised around the quantities an experiment measures:
//!
//! * [`model`]: cavity response, the emitter steady state, complex
//!   transmission amplitude, total (coherent + incoherent) transmission and
//!   the critical power of the nonlinearity.
//! * [`broadening`]: Lorentzian spectral-fluctuation convolution of any
//!   transmission curve over the emitter detuning.
//! * [`contrast`]: dip contrast, detuning maps and the Lamb shift.
//! * [`g2`]: second-order correlation of the backward-transmitted field.
//! * [`fitting`]: least-squares estimators for cavity and emitter
//!   parameters and the contrast-optimal coupling.
//!
//! All rates and detunings are angular frequencies in rad/s. Use
//! [`units`] to move between rad/s and the `value / 2π` GHz figures that
//! laboratory notes quote.

pub mod broadening;
pub mod contrast;
pub mod fitting;
pub mod g2;
pub mod model;
pub mod units;

mod error;

pub use error::{Error, Result};
pub use model::{CavityParams, Direction, DriveField, EmitterParams, Handedness, SteadyState, TransmissionResult};
