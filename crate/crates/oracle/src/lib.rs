//! Brute-force reference for the emitter–cavity model.
//!
//! The full master equation is solved on a truncated Fock space of the two
//! cavity modes, with no adiabatic elimination: build the Liouvillian of
//! the driven system, find its steady state with a sparse direct solve, and
//! read off the transmitted intensity and, by the quantum regression
//! theorem, its intensity correlation.
//!
//! ```
//! use chiral_oracle::{build_liouvillian, steady_state_rho, transmission, TruncatedSystem};
//!
//! let sys = TruncatedSystem {
//!     n_fock: 3,
//!     g: 0.0,
//!     kappa: 1.0,
//!     gamma: 0.01,
//!     delta_h: 0.0,
//!     delta_v: 0.0,
//!     delta_omega: 0.0,
//!     handedness: 1.0,
//!     drive: 1e-3,
//! };
//! let l = build_liouvillian(&sys).unwrap();
//! let ss = steady_state_rho(&l).unwrap();
//! // An empty resonant cavity sends all light back out: |1 − 2|² = 1.
//! assert!((transmission(&l, &ss.rho).unwrap() - 1.0).abs() < 1e-9);
//! ```

mod correlation;
pub mod sparse;
mod state;
mod system;

pub use correlation::{g2_regression, G2Curve};
pub use state::{
    output_amplitude, steady_state_rho, transmission, DensityOperator, SteadyState, CUTOFF_TOLERANCE,
    RESIDUAL_TOLERANCE,
};
pub use system::{build_liouvillian, Liouvillian, Operators, TruncatedSystem};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("steady-state solve failed: {0}")]
    Solve(String),
    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),
    #[error("propagation failed at tau = {tau:.3e} s (trace drift {trace_drift:.3e})")]
    Propagation { tau: f64, trace_drift: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
