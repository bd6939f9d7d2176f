use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::sparse::{Csr, C64};
use crate::system::Liouvillian;
use crate::{Error, Result};

/// Largest ‖L ρ‖∞ accepted from the direct solve (units of the rate unit).
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Top-Fock population above which the truncation is considered too small.
pub const CUTOFF_TOLERANCE: f64 = 1e-6;

/// Density matrix stored column-major, matching the vectorisation of the
/// generator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dim: usize,
    data: Vec<C64>,
}

impl DensityOperator {
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i + j * self.dim]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// tr(A ρ).
    pub fn expect(&self, op: &Csr) -> C64 {
        op.triplets().map(|(r, c, v)| v * self.get(c, r)).sum()
    }

    /// max |ρ − ρ†|.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let m = Mat::<C64>::from_fn(self.dim, self.dim, |i, j| {
            0.5 * (self.get(i, j) + self.get(j, i).conj())
        });
        let ev = m
            .as_ref()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        Ok(ev.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// A ρ B as a new operator (not normalised).
    pub fn sandwich(&self, a: &Csr, b: &Csr) -> Self {
        let d = self.dim;
        // (A ρ)_{ik} then (A ρ B)_{ij}
        let mut ar = vec![C64::new(0.0, 0.0); d * d];
        for (i, k, v) in a.triplets() {
            for j in 0..d {
                ar[i + j * d] += v * self.get(k, j);
            }
        }
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for (k, j, v) in b.triplets() {
            for i in 0..d {
                out[i + j * d] += ar[i + k * d] * v;
            }
        }
        Self { dim: d, data: out }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityOperator,
    /// ‖L ρ‖∞ of the solution.
    pub residual: f64,
    /// Larger of the two modes' top-Fock populations.
    pub top_fock_population: f64,
}

impl SteadyState {
    pub fn cutoff_adequate(&self) -> bool {
        self.top_fock_population <= CUTOFF_TOLERANCE
    }
}

/// Solves L ρ = 0 with tr ρ = 1 by sparse LU, the trace condition replacing
/// the first equation.
pub fn steady_state_rho(l: &Liouvillian) -> Result<SteadyState> {
    let d = l.dim();
    let n = d * d;
    let mut triplets: Vec<Triplet<usize, usize, C64>> = l
        .matrix
        .triplets()
        .filter(|&(r, _, _)| r != 0)
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    triplets.extend((0..d).map(|i| Triplet::new(0, i + i * d, C64::new(1.0, 0.0))));
    let a = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Solve(format!("assembly failed: {e:?}")))?;
    let lu = a
        .sp_lu()
        .map_err(|e| Error::Solve(format!("factorisation failed: {e:?}")))?;
    let mut rhs = Mat::<C64>::zeros(n, 1);
    rhs[(0, 0)] = C64::new(1.0, 0.0);
    faer::prelude::Solve::solve_in_place(&lu, rhs.as_mut());
    let data: Vec<C64> = (0..n).map(|i| rhs[(i, 0)]).collect();
    if data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Solve("singular generator: non-finite steady state".into()));
    }
    let mut rho = DensityOperator::from_vec(d, data);
    // Remove the anti-Hermitian round-off.
    let herm: Vec<C64> = (0..n)
        .map(|k| {
            let (i, j) = (k % d, k / d);
            0.5 * (rho.get(i, j) + rho.get(j, i).conj())
        })
        .collect();
    rho = DensityOperator::from_vec(d, herm);
    let residual = l
        .matrix
        .matvec(rho.as_slice())
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::Solve(format!("ill-conditioned solve: residual {residual:.3e}")));
    }
    let nf = l.system.n_fock;
    let top = |h: bool| rho.expect(&l.operators.top_fock_projector(nf, h)).re;
    let top_fock_population = top(true).max(top(false));
    Ok(SteadyState {
        rho,
        residual,
        top_fock_population,
    })
}

/// ⟨b_out† b_out⟩ / |b_in|².
pub fn transmission(l: &Liouvillian, rho: &DensityOperator) -> Result<f64> {
    if l.system.drive == 0.0 {
        return Err(Error::InvalidSystem("transmission needs a non-zero drive".into()));
    }
    let j = l.output_operator();
    let flux = rho.expect(&j.adjoint().matmul(&j)).re * l.rate_unit();
    Ok(flux / (l.system.drive * l.system.drive))
}

/// ⟨b_out⟩ / b_in.
pub fn output_amplitude(l: &Liouvillian, rho: &DensityOperator) -> Result<C64> {
    if l.system.drive == 0.0 {
        return Err(Error::InvalidSystem("output amplitude needs a non-zero drive".into()));
    }
    Ok(rho.expect(&l.output_operator()) * l.rate_unit().sqrt() / l.system.drive)
}
