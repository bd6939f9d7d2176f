use crate::sparse::{Csr, C64};
use crate::{Error, Result};

/// Emitter plus two orthogonally polarised cavity modes, each truncated at
/// `n_fock` photons (Fock states 0..n_fock−1). Rates and detunings in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSystem {
    pub n_fock: usize,
    /// Emitter coupling to the H mode; the V coupling is i·l·g.
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    /// H-mode frequency minus emitter frequency.
    pub delta_h: f64,
    /// V-mode frequency minus emitter frequency.
    pub delta_v: f64,
    /// Emitter frequency minus laser frequency.
    pub delta_omega: f64,
    /// Effective handedness l = ±1 of the dipole seen by the drive.
    pub handedness: f64,
    /// Input amplitude b_in, |b_in|² in photons per second.
    pub drive: f64,
}

impl TruncatedSystem {
    pub fn validate(&self) -> Result<()> {
        if self.n_fock < 2 {
            return Err(Error::InvalidSystem(format!(
                "n_fock must be at least 2, got {}",
                self.n_fock
            )));
        }
        let fields = [
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("delta_h", self.delta_h),
            ("delta_v", self.delta_v),
            ("delta_omega", self.delta_omega),
            ("drive", self.drive),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidSystem(format!("{name} must be finite, got {v}")));
            }
        }
        for (name, v) in [
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("drive", self.drive),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidSystem(format!("{name} must be non-negative, got {v}")));
            }
        }
        if self.kappa == 0.0 {
            return Err(Error::InvalidSystem("kappa must be positive".into()));
        }
        if self.handedness != 1.0 && self.handedness != -1.0 {
            return Err(Error::InvalidSystem(format!(
                "handedness must be +1 or -1, got {}",
                self.handedness
            )));
        }
        Ok(())
    }

    /// Hilbert-space dimension 2·n_fock².
    pub fn dim(&self) -> usize {
        2 * self.n_fock * self.n_fock
    }

    /// Rate used to make the generator dimensionless.
    pub fn rate_unit(&self) -> f64 {
        self.kappa
    }

    pub fn with_drive(self, drive: f64) -> Self {
        Self { drive, ..self }
    }

    pub fn with_handedness(self, handedness: f64) -> Self {
        Self { handedness, ..self }
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn destroy(n: usize) -> Csr {
    Csr::from_triplets(n, n, (1..n).map(|k| (k - 1, k, re((k as f64).sqrt()))).collect())
}

/// Operators on emitter ⊗ H ⊗ V. Index = e·n² + h·n + v with e = 0 the
/// ground state.
#[derive(Debug, Clone)]
pub struct Operators {
    pub sigma: Csr,
    pub a_h: Csr,
    pub a_v: Csr,
    pub identity: Csr,
}

impl Operators {
    pub fn new(n_fock: usize) -> Self {
        let i2 = Csr::identity(2);
        let i_n = Csr::identity(n_fock);
        let lower = Csr::from_triplets(2, 2, vec![(0, 1, re(1.0))]);
        let a = destroy(n_fock);
        Self {
            sigma: lower.kron(&i_n).kron(&i_n),
            a_h: i2.kron(&a).kron(&i_n),
            a_v: i2.kron(&i_n).kron(&a),
            identity: Csr::identity(2 * n_fock * n_fock),
        }
    }

    pub fn number(op: &Csr) -> Csr {
        op.adjoint().matmul(op)
    }

    /// Projector onto the highest retained Fock state of a mode operator.
    pub fn top_fock_projector(&self, n_fock: usize, mode_h: bool) -> Csr {
        let dim = 2 * n_fock * n_fock;
        let top = n_fock - 1;
        let t = (0..dim)
            .filter(|i| {
                let h = (i / n_fock) % n_fock;
                let v = i % n_fock;
                if mode_h {
                    h == top
                } else {
                    v == top
                }
            })
            .map(|i| (i, i, re(1.0)))
            .collect();
        Csr::from_triplets(dim, dim, t)
    }
}

/// Generator of the master equation in the laser frame, in units of
/// `rate_unit`, acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub system: TruncatedSystem,
    pub operators: Operators,
    pub matrix: Csr,
    pub hamiltonian: Csr,
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn rate_unit(&self) -> f64 {
        self.system.rate_unit()
    }

    /// Field leaving the output port, b_in + √(κ/2)(i a_H + a_V), in units
    /// of √rate_unit.
    pub fn output_operator(&self) -> Csr {
        let s = &self.system;
        let u = s.rate_unit();
        let ops = &self.operators;
        let k = (0.5 * s.kappa / u).sqrt();
        ops.identity
            .scale(re(s.drive / u.sqrt()))
            .add(&ops.a_h.scale(C64::new(0.0, k)))
            .add(&ops.a_v.scale(re(k)))
    }
}

fn dissipator(op: &Csr, rate: f64, id: &Csr) -> Csr {
    let n = Operators::number(op);
    op.conj()
        .kron(op)
        .add(&id.kron(&n).scale(re(-0.5)))
        .add(&n.transpose().kron(id).scale(re(-0.5)))
        .scale(re(rate))
}

pub fn build_liouvillian(system: &TruncatedSystem) -> Result<Liouvillian> {
    system.validate()?;
    let s = *system;
    let u = s.rate_unit();
    let ops = Operators::new(s.n_fock);
    let (sig, ah, av) = (&ops.sigma, &ops.a_h, &ops.a_v);
    let i = C64::new(0.0, 1.0);

    let g = s.g / u;
    let g_v = i * s.handedness * g;
    let sqrt_k = (s.kappa / u).sqrt();
    let b_h = re(s.drive / u.sqrt() / 2f64.sqrt());
    let b_v = i * s.drive / u.sqrt() / 2f64.sqrt();

    let mut h = Operators::number(sig).scale(re(s.delta_omega / u));
    h = h.add(&Operators::number(ah).scale(re((s.delta_omega + s.delta_h) / u)));
    h = h.add(&Operators::number(av).scale(re((s.delta_omega + s.delta_v) / u)));
    let coupling = sig
        .adjoint()
        .matmul(ah)
        .scale(i * g)
        .add(&sig.adjoint().matmul(av).scale(i * g_v.conj()));
    h = h.add(&coupling).add(&coupling.adjoint());
    let drive = ah.adjoint().scale(b_h).add(&av.adjoint().scale(b_v));
    h = h.add(&drive.add(&drive.adjoint()).scale(re(-sqrt_k)));

    let id = &ops.identity;
    let coherent = id.kron(&h).add(&h.transpose().kron(id).scale(re(-1.0))).scale(-i);
    let matrix = coherent
        .add(&dissipator(ah, s.kappa / u, id))
        .add(&dissipator(av, s.kappa / u, id))
        .add(&dissipator(sig, s.gamma / u, id));
    Ok(Liouvillian {
        system: s,
        operators: ops,
        matrix,
        hamiltonian: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system() -> TruncatedSystem {
        TruncatedSystem {
            n_fock: 3,
            g: 0.1,
            kappa: 1.0,
            gamma: 0.01,
            delta_h: 0.2,
            delta_v: -0.1,
            delta_omega: 0.05,
            handedness: 1.0,
            drive: 0.3,
        }
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let l = build_liouvillian(&system()).unwrap();
        let h = &l.hamiltonian;
        let d = h.add(&h.adjoint().scale(re(-1.0)));
        assert_eq!(d.nnz(), 0);
    }

    #[test]
    fn generator_preserves_trace() {
        // Σ_i L[(i,i), k] = 0 for every column k.
        let l = build_liouvillian(&system()).unwrap();
        let d = l.dim();
        let mut sums = vec![C64::new(0.0, 0.0); d * d];
        for (r, c, v) in l.matrix.triplets() {
            if r % d == r / d {
                sums[c] += v;
            }
        }
        assert!(sums.iter().all(|s| s.norm() < 1e-14));
    }

    #[test]
    fn commutator_of_modes() {
        let ops = Operators::new(4);
        let ah = &ops.a_h;
        let comm = ah.matmul(&ah.adjoint()).add(&ah.adjoint().matmul(ah).scale(re(-1.0)));
        // [a, a†] = 1 except on the truncated top level.
        for i in 0..ops.identity.rows {
            let top = (i / 4) % 4 == 3;
            let expected = if top { -3.0 } else { 1.0 };
            assert!((comm.get(i, i) - re(expected)).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_systems() {
        let mut s = system();
        s.n_fock = 1;
        assert!(build_liouvillian(&s).is_err());
        let mut s = system();
        s.handedness = 0.5;
        assert!(build_liouvillian(&s).is_err());
        let mut s = system();
        s.kappa = f64::NAN;
        assert!(build_liouvillian(&s).is_err());
    }
}
