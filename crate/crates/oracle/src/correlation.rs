use crate::sparse::{Csr, C64};
use crate::state::DensityOperator;
use crate::system::Liouvillian;
use crate::{Error, Result};

/// Largest step, as a fraction of 1/‖L‖, taken by the RK4 integrator.
const STEP_FRACTION: f64 = 1.0;
/// Drift of tr x(τ) − 1 beyond which propagation counts as failed.
const TRACE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct G2Curve {
    /// Delays (s).
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    /// Worst |tr x(τ) − 1| along the propagation.
    pub trace_drift: f64,
}

fn rk4_step(l: &Csr, x: &mut [C64], h: f64, k: &mut [Vec<C64>; 5]) {
    let n = x.len();
    let [k1, k2, k3, k4, tmp] = k;
    l.matvec_into(x, k1);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k1[i];
    }
    l.matvec_into(tmp, k2);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * h * k2[i];
    }
    l.matvec_into(tmp, k3);
    for i in 0..n {
        tmp[i] = x[i] + h * k3[i];
    }
    l.matvec_into(tmp, k4);
    for i in 0..n {
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Normalised intensity correlation of the output field by the quantum
/// regression theorem: g²(τ) = tr(J†J e^{Lτ}[J ρ J†]) / ⟨J†J⟩². Delays are
/// in seconds, non-negative and non-decreasing.
pub fn g2_regression(l: &Liouvillian, rho_ss: &DensityOperator, taus: &[f64]) -> Result<G2Curve> {
    if taus.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidSystem("delays must be finite and non-negative".into()));
    }
    if taus.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidSystem("delays must be sorted".into()));
    }
    let j = l.output_operator();
    let jd = j.adjoint();
    let n_op = jd.matmul(&j);
    let mean = rho_ss.expect(&n_op).re;
    if mean.is_nan() || mean <= 0.0 {
        return Err(Error::InvalidSystem(format!(
            "output intensity {mean:.3e} is not positive"
        )));
    }
    let start = rho_ss.sandwich(&j, &jd).scaled(C64::new(1.0 / mean, 0.0));
    let d = start.dim();
    let mut x = start.as_slice().to_vec();

    let h_max = STEP_FRACTION / l.matrix.gershgorin_bound().max(f64::MIN_POSITIVE);
    let mut work: [Vec<C64>; 5] = std::array::from_fn(|_| vec![C64::new(0.0, 0.0); x.len()]);
    let mut now = 0.0;
    let mut values = Vec::with_capacity(taus.len());
    let mut drift: f64 = 0.0;
    for &tau in taus {
        let target = tau * l.rate_unit();
        let span = target - now;
        if span > 0.0 {
            let steps = (span / h_max).ceil() as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                rk4_step(&l.matrix, &mut x, h, &mut work);
            }
            now = target;
        }
        let state = DensityOperator::from_vec(d, x.clone());
        let tr = state.trace();
        drift = drift.max((tr - 1.0).norm());
        let g = state.expect(&n_op).re / mean;
        if !g.is_finite() || drift > TRACE_TOLERANCE {
            return Err(Error::Propagation {
                tau,
                trace_drift: drift,
            });
        }
        values.push(g);
    }
    Ok(G2Curve {
        taus: taus.to_vec(),
        values,
        trace_drift: drift,
    })
}
