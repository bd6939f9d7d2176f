//! Minimal compressed-sparse-row matrices over Complex64, enough to assemble
//! a Liouvillian from tensor products and to propagate with it.

use num_complex::Complex64;

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub rows: usize,
    pub cols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<C64>,
}

impl Csr {
    /// Duplicates are summed; exact zeros are dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut t: Vec<(usize, usize, C64)>) -> Self {
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; rows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<C64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            debug_assert!(r < rows && c < cols);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        let mut m = Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        };
        m.prune();
        m
    }

    fn prune(&mut self) {
        if self.values.iter().all(|v| *v != C64::new(0.0, 0.0)) {
            return;
        }
        let t = self.triplets().filter(|t| t.2 != C64::new(0.0, 0.0)).collect();
        *self = Self::from_triplets(self.rows, self.cols, t);
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_triplets(rows, cols, Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect())
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows)
            .flat_map(move |r| (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.values[k])))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        (self.indptr[r]..self.indptr[r + 1])
            .find(|&k| self.indices[k] == c)
            .map_or(C64::new(0.0, 0.0), |k| self.values[k])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
        .pruned()
    }

    fn pruned(mut self) -> Self {
        self.prune();
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_triplets(self.rows, self.cols, self.triplets().chain(other.triplets()).collect())
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.cols,
            self.rows,
            self.triplets().map(|(r, c, v)| (c, r, v)).collect(),
        )
    }

    pub fn conj(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.conj()).collect(),
            ..self.clone()
        }
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut t = Vec::new();
        for (r, k, a) in self.triplets() {
            for j in other.indptr[k]..other.indptr[k + 1] {
                t.push((r, other.indices[j], a * other.values[j]));
            }
        }
        Self::from_triplets(self.rows, other.cols, t)
    }

    /// Kronecker product A ⊗ B.
    pub fn kron(&self, other: &Self) -> Self {
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, a) in self.triplets() {
            for (r2, c2, b) in other.triplets() {
                t.push((r1 * other.rows + r2, c1 * other.cols + c2, a * b));
            }
        }
        Self::from_triplets(self.rows * other.rows, self.cols * other.cols, t)
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *out = acc;
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        self.matvec_into(x, &mut y);
        y
    }

    /// Largest absolute row sum, a bound on every eigenvalue's modulus.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.rows)
            .map(|r| {
                (self.indptr[r]..self.indptr[r + 1])
                    .map(|k| self.values[k].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}
