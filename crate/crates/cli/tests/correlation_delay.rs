//! The closed-form g²(τ) against the master-equation solution at finite
//! delay, through the same parameter mapping the oracle-check scenario uses.

use chiral_core::g2::{g2_tau, purcell_1s_to_2s, G2Params, PowerCalibration};
use chiral_core::model::{critical_power, purcell_fp1_from_beta, CavityParams, EmitterParams, Handedness};
use chiral_core::units::{ghz_to_rad, nm_to_m};
use chiral_oracle::{build_liouvillian, g2_regression, steady_state_rho, TruncatedSystem};

#[test]
fn delay_dependence_follows_the_oracle() {
    for beta in [0.2, 0.4] {
        let cavity = CavityParams::degenerate(ghz_to_rad(102.0), nm_to_m(945.0)).unwrap();
        let kappa = cavity.kappa;
        let g = kappa / 100.0;
        let fp1 = purcell_fp1_from_beta(beta).unwrap();
        let gamma = 4.0 * g * g / (fp1 * kappa);
        let emitter = EmitterParams::new(gamma, fp1, Handedness::Right).unwrap();
        let p_c = critical_power(&cavity, &emitter).unwrap();
        let power = 0.01 * p_c;

        let f_1s = beta / (1.0 - beta);
        let y = PowerCalibration::physical(purcell_1s_to_2s(f_1s).unwrap()).rabi_y(power, p_c);
        let params = G2Params::new(f_1s, gamma, y).unwrap();

        let system = TruncatedSystem {
            n_fock: 4,
            g,
            kappa,
            gamma,
            delta_h: 0.0,
            delta_v: 0.0,
            delta_omega: 0.0,
            handedness: 1.0,
            drive: (power / cavity.photon_energy()).sqrt(),
        };
        let l = build_liouvillian(&system).unwrap();
        let ss = steady_state_rho(&l).unwrap();
        let gamma_tot = emitter.gamma_total();
        let taus: Vec<f64> = [0.0, 0.5, 1.0, 2.0, 4.0].iter().map(|t| t / gamma_tot).collect();
        let oracle = g2_regression(&l, &ss.rho, &taus).unwrap();
        for (&tau, &o) in taus.iter().zip(&oracle.values) {
            let a = g2_tau(&params, tau).unwrap();
            // Compare the excursion from 1, which carries the delay dependence.
            let scale = (o - 1.0).abs().max(0.05);
            assert!(
                ((a - 1.0) - (o - 1.0)).abs() < 0.03 * scale,
                "beta {beta} Γτ {}: {a} vs {o}",
                tau * gamma_tot
            );
        }
    }
}
