//! Density matrices, Bloch coordinates, partial trace, and entropies.

use super::linalg::{eigh, matrix_func_hermitian, svd_right};
use super::matrix::{C64, ComplexMatrix, IM};
use crate::error::{Error, Result};

/// Hermiticity / unit-trace construction tolerance.
pub const STATE_TOL: f64 = 1e-12;
/// Most negative eigenvalue tolerated before construction fails; anything in
/// `(-EIG_CLAMP_TOL, 0)` is clamped to zero and the state renormalized.
pub const EIG_CLAMP_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as exact zeros in entropies.
pub const ENTROPY_EIG_FLOOR: f64 = 1e-14;

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and normalizes. Tiny negative eigenvalues (above
    /// `-EIG_CLAMP_TOL`) are clamped to zero and the trace renormalized;
    /// anything worse is an error.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        let dev = (tr - C64::new(1.0, 0.0)).norm();
        if dev > STATE_TOL {
            return Err(Error::TraceDeviation(dev));
        }
        let m = matrix.hermitize();
        let eig = eigh(&m)?;
        let min = eig.values[0];
        if min < -EIG_CLAMP_TOL {
            return Err(Error::NotPositive(min));
        }
        if min < 0.0 {
            // Clamp and renormalize through the spectral form.
            let n = m.dim();
            let mut clamped = ComplexMatrix::zeros(n);
            let total: f64 = eig.values.iter().map(|&l| l.max(0.0)).sum();
            for k in 0..n {
                let l = eig.values[k].max(0.0) / total;
                if l == 0.0 {
                    continue;
                }
                for i in 0..n {
                    let vik = eig.vectors.get(i, k);
                    for j in 0..n {
                        clamped.add_to(i, j, vik * eig.vectors.get(j, k).conj() * l);
                    }
                }
            }
            return Ok(Self { matrix: clamped.hermitize() });
        }
        Ok(Self { matrix: m })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix.get(i, j)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64) }
    }

    /// Pure state from an unnormalized ket.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        let n = ket.len();
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if norm == 0.0 {
            return Err(Error::Numerical("zero ket".into()));
        }
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, ket[i] * ket[j].conj() / norm);
            }
        }
        Self::new(m)
    }

    /// Qubit state from population bias `delta = p1 - p0` (excited minus
    /// ground) and coherence `c = <0|rho|1>`.
    pub fn qubit(delta: f64, c: C64) -> Result<Self> {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 0, C64::new((1.0 - delta) / 2.0, 0.0));
        m.set(1, 1, C64::new((1.0 + delta) / 2.0, 0.0));
        m.set(0, 1, c);
        m.set(1, 0, c.conj());
        Self::new(m)
    }

    /// Population bias `p1 - p0` of a qubit state.
    pub fn bias(&self) -> f64 {
        debug_assert_eq!(self.dim(), 2);
        (self.get(1, 1) - self.get(0, 0)).re
    }

    /// Coherence element `<0|rho|1>` of a qubit state.
    pub fn coherence(&self) -> C64 {
        debug_assert_eq!(self.dim(), 2);
        self.get(0, 1)
    }
}

/// Bloch coordinates of a qubit state. The excited state `|1>` sits at
/// `z = +1`, so `z` equals the population bias `delta = p1 - p0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let r2 = x * x + y * y + z * z;
        if r2 > 1.0 + 1e-12 {
            return Err(Error::NotPositive(1.0 - r2));
        }
        Ok(Self { x, y, z })
    }

    /// `rho_00 = (1 - z)/2`, `rho_11 = (1 + z)/2`, `rho_01 = (x - i y)/2`.
    pub fn to_density(self) -> Result<DensityMatrix> {
        DensityMatrix::qubit(self.z, C64::new(self.x / 2.0, -self.y / 2.0))
    }

    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch(rho.dim(), 2));
        }
        let c = rho.coherence();
        Self::new(2.0 * c.re, -2.0 * c.im, rho.bias())
    }
}

/// Kronecker product; the left factor carries the slow (major) index.
/// Ordering convention throughout the crate: machine (x) atom.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn tensor_states(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    // Product of valid states is valid by construction.
    DensityMatrix { matrix: a.matrix().kron(b.matrix()) }
}

/// Which factor of a bipartite state to keep in a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of a `(d_a * d_b)`-dimensional operator.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: (usize, usize),
    keep: Keep,
) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if da * db != m.dim() {
        return Err(Error::DimensionMismatch(da * db, m.dim()));
    }
    match keep {
        Keep::A => {
            let mut out = ComplexMatrix::zeros(da);
            for i in 0..da {
                for j in 0..da {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..db {
                        acc += m.get(i * db + k, j * db + k);
                    }
                    out.set(i, j, acc);
                }
            }
            Ok(out)
        }
        Keep::B => {
            let mut out = ComplexMatrix::zeros(db);
            for i in 0..db {
                for j in 0..db {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..da {
                        acc += m.get(k * db + i, k * db + j);
                    }
                    out.set(i, j, acc);
                }
            }
            Ok(out)
        }
    }
}

pub fn partial_trace(rho: &DensityMatrix, dims: (usize, usize), keep: Keep) -> Result<DensityMatrix> {
    DensityMatrix::new(partial_trace_matrix(rho.matrix(), dims, keep)?)
}

/// Von Neumann entropy in nats, `-sum lambda ln lambda` with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_hermitian(rho.matrix())
}

/// Entropy of a Hermitian PSD matrix of unit trace; eigenvalues below
/// `ENTROPY_EIG_FLOOR` are treated as zero.
pub fn entropy_of_hermitian(m: &ComplexMatrix) -> f64 {
    let eig = eigh(m).expect("entropy of non-Hermitian matrix");
    eig.values
        .iter()
        .filter(|&&l| l > ENTROPY_EIG_FLOOR)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Quantum relative entropy `Tr[rho (ln rho - ln sigma)]` in nats.
///
/// Returns `f64::INFINITY` when the support of `rho` is not contained in the
/// support of `sigma`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let n = rho.dim();
    let er = eigh(rho.matrix())?;
    let es = eigh(sigma.matrix())?;
    let mut acc = 0.0;
    for i in 0..n {
        let li = er.values[i].max(0.0);
        if li <= ENTROPY_EIG_FLOOR {
            continue;
        }
        acc += li * li.ln();
        for j in 0..n {
            let overlap: C64 = (0..n)
                .map(|r| er.vectors.get(r, i).conj() * es.vectors.get(r, j))
                .sum();
            let w = li * overlap.norm_sqr();
            let mj = es.values[j].max(0.0);
            if mj <= ENTROPY_EIG_FLOOR {
                if w > 1e-12 {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            acc -= w * mj.ln();
        }
    }
    Ok(acc)
}

/// Unitary `exp(-i H t)` of a Hermitian generator, via eigendecomposition.
pub fn expm_hermitian_generator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    matrix_func_hermitian(h, |x| (-IM * (x * t)).exp())
}

/// Trace norm (sum of singular values). For Hermitian input this is the sum
/// of absolute eigenvalues.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.hermiticity_defect() <= 1e-9 * m.max_abs().max(1.0) {
        let eig = eigh(&m.hermitize()).expect("hermitized input");
        eig.values.iter().map(|l| l.abs()).sum()
    } else {
        svd_right(m).values.iter().sum()
    }
}

/// Trace norm of the difference of two states (the convergence metric used
/// by the cascade: no factor 1/2).
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    trace_norm(&(a.matrix() - b.matrix()))
}
