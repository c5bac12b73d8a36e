//! Coherence and asymmetry measures: full and partial dephasing, relative
//! entropy of coherence (REC) and of asymmetry (REA), mutual information,
//! and the bipartite additivity identities.
//!
//! REC is measured against an orthonormal basis and is additive on product
//! states; REA is measured against the spectral projectors of a Hamiltonian,
//! is conserved by covariant unitaries, and is sub-additive when the global
//! Hamiltonian is degenerate. For a non-degenerate Hamiltonian the two
//! coincide.

use crate::error::{Error, Result};
use crate::qstate::{
    C64, ComplexMatrix, DensityMatrix, Keep, commutator, eigh,
    partial_trace, tensor, tensor_states, von_neumann_entropy,
};

/// Eigenvalue gap below which two levels are clustered into one degenerate
/// eigenspace when building spectral projectors.
pub const SPECTRAL_CLUSTER_GAP: f64 = 1e-9;

const PROJECTOR_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-10;

/// Spectral decomposition of a Hermitian operator: orthogonal projectors
/// onto its (possibly degenerate) eigenspaces with strictly distinct
/// energies.
#[derive(Clone, Debug)]
pub struct SpectralProjectors {
    projectors: Vec<ComplexMatrix>,
    energies: Vec<f64>,
}

impl SpectralProjectors {
    /// Clusters the eigenvalues of `h` with gap threshold
    /// [`SPECTRAL_CLUSTER_GAP`] and builds one projector per cluster.
    pub fn from_hamiltonian(h: &ComplexMatrix) -> Result<Self> {
        let eig = eigh(h)?;
        let n = h.dim();
        let mut projectors = Vec::new();
        let mut energies = Vec::new();
        let mut start = 0;
        while start < n {
            let mut end = start;
            while end + 1 < n && eig.values[end + 1] - eig.values[end] < SPECTRAL_CLUSTER_GAP {
                end += 1;
            }
            let mut p = ComplexMatrix::zeros(n);
            for k in start..=end {
                for i in 0..n {
                    let vik = eig.vectors.get(i, k);
                    for j in 0..n {
                        p.add_to(i, j, vik * eig.vectors.get(j, k).conj());
                    }
                }
            }
            projectors.push(p.hermitize());
            let mean = eig.values[start..=end].iter().sum::<f64>() / (end - start + 1) as f64;
            energies.push(mean);
            start = end + 1;
        }
        let out = Self { projectors, energies };
        out.check_completeness()?;
        Ok(out)
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    /// True when every eigenspace is one-dimensional.
    pub fn is_non_degenerate(&self) -> bool {
        self.projectors.len() == self.dim()
    }

    fn check_completeness(&self) -> Result<()> {
        let n = self.dim();
        let mut sum = ComplexMatrix::zeros(n);
        for p in &self.projectors {
            sum = &sum + p;
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(n));
        if dev > PROJECTOR_TOL {
            return Err(Error::IncompleteProjectors(dev));
        }
        for (i, p) in self.projectors.iter().enumerate() {
            for (j, q) in self.projectors.iter().enumerate() {
                let prod = p * q;
                let expect = if i == j { p.clone() } else { ComplexMatrix::zeros(n) };
                let dev = prod.max_abs_diff(&expect);
                if dev > PROJECTOR_TOL {
                    return Err(Error::IncompleteProjectors(dev));
                }
            }
        }
        Ok(())
    }
}

fn check_orthonormal(basis: &ComplexMatrix) -> Result<()> {
    let gram = &basis.adjoint() * basis;
    let dev = gram.max_abs_diff(&ComplexMatrix::identity(basis.dim()));
    if dev > PROJECTOR_TOL {
        return Err(Error::NotOrthonormal(dev));
    }
    Ok(())
}

/// Fully dephased state: the diagonal of `rho` in the given orthonormal
/// basis (columns of `basis`). Idempotent and trace preserving.
pub fn full_dephase(rho: &DensityMatrix, basis: &ComplexMatrix) -> Result<DensityMatrix> {
    if basis.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(basis.dim(), rho.dim()));
    }
    check_orthonormal(basis)?;
    let n = rho.dim();
    let mut out = ComplexMatrix::zeros(n);
    for k in 0..n {
        // p_k = <b_k| rho |b_k|>
        let mut pk = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                pk += basis.get(i, k).conj() * rho.get(i, j) * basis.get(j, k);
            }
        }
        for i in 0..n {
            let bik = basis.get(i, k);
            for j in 0..n {
                out.add_to(i, j, pk * bik * basis.get(j, k).conj());
            }
        }
    }
    DensityMatrix::new(out.hermitize())
}

/// Full dephasing in the computational basis.
pub fn full_dephase_computational(rho: &DensityMatrix) -> DensityMatrix {
    let n = rho.dim();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        out.set(i, i, C64::new(rho.get(i, i).re, 0.0));
    }
    DensityMatrix::new(out).expect("diagonal of a valid state")
}

/// Partially dephased state `sum_j P_j rho P_j`; retains coherences inside
/// each degenerate eigenspace.
pub fn partial_dephase(rho: &DensityMatrix, h: &SpectralProjectors) -> Result<DensityMatrix> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(h.dim(), rho.dim()));
    }
    let mut out = ComplexMatrix::zeros(rho.dim());
    for p in h.projectors() {
        out = &out + &(&(p * rho.matrix()) * p);
    }
    DensityMatrix::new(out.hermitize())
}

/// Relative entropy of coherence, `S(rho_bar) - S(rho) >= 0`, in nats.
pub fn rec(rho: &DensityMatrix, basis: &ComplexMatrix) -> Result<f64> {
    let dephased = full_dephase(rho, basis)?;
    Ok(von_neumann_entropy(&dephased) - von_neumann_entropy(rho))
}

/// REC in the computational basis.
pub fn rec_computational(rho: &DensityMatrix) -> f64 {
    von_neumann_entropy(&full_dephase_computational(rho)) - von_neumann_entropy(rho)
}

/// Relative entropy of asymmetry, `S(rho_tilde) - S(rho) >= 0`, in nats.
/// Equals REC in the eigenbasis whenever the Hamiltonian is non-degenerate.
pub fn rea(rho: &DensityMatrix, h: &SpectralProjectors) -> Result<f64> {
    let dephased = partial_dephase(rho, h)?;
    Ok(von_neumann_entropy(&dephased) - von_neumann_entropy(rho))
}

/// Quantum mutual information `S(rho_A) + S(rho_B) - S(rho_AB)` in nats.
pub fn mutual_information(rho_ab: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    let a = partial_trace(rho_ab, dims, Keep::A)?;
    let b = partial_trace(rho_ab, dims, Keep::B)?;
    Ok(von_neumann_entropy(&a) + von_neumann_entropy(&b) - von_neumann_entropy(rho_ab))
}

/// All coherence/asymmetry bookkeeping of a bipartite state against local
/// Hamiltonians `h_a`, `h_b` (global `H = h_a (x) I + I (x) h_b`) and local
/// eigenbases `basis_a`, `basis_b`.
#[derive(Clone, Debug)]
pub struct BipartiteReport {
    pub c_global: f64,
    pub a_global: f64,
    pub c_a: f64,
    pub c_b: f64,
    pub a_a: f64,
    pub a_b: f64,
    pub i_rho: f64,
    pub i_dephased_full: f64,
    pub i_dephased_partial: f64,
}

/// Computes the report and verifies the additivity identities
/// `C = C_A + C_B - I(rho_bar) + I(rho)` and
/// `A = A_A + A_B - I(rho_tilde) + I(rho)` to 1e-10.
pub fn bipartite_report(
    rho_ab: &DensityMatrix,
    h_a: &ComplexMatrix,
    h_b: &ComplexMatrix,
    basis_a: &ComplexMatrix,
    basis_b: &ComplexMatrix,
) -> Result<BipartiteReport> {
    let (da, db) = (h_a.dim(), h_b.dim());
    if da * db != rho_ab.dim() {
        return Err(Error::DimensionMismatch(da * db, rho_ab.dim()));
    }
    check_orthonormal(basis_a)?;
    check_orthonormal(basis_b)?;
    // The supplied local bases must diagonalize the local Hamiltonians.
    for (h, basis) in [(h_a, basis_a), (h_b, basis_b)] {
        let d = &(&basis.adjoint() * h) * basis;
        let mut off = 0.0f64;
        for i in 0..d.dim() {
            for j in 0..d.dim() {
                if i != j {
                    off = off.max(d.get(i, j).norm());
                }
            }
        }
        if off > 1e-9 {
            return Err(Error::NotEnergyEigenbasis(off));
        }
    }
    let h = &tensor(h_a, &ComplexMatrix::identity(db)) + &tensor(&ComplexMatrix::identity(da), h_b);
    let spect = SpectralProjectors::from_hamiltonian(&h)?;
    let spect_a = SpectralProjectors::from_hamiltonian(h_a)?;
    let spect_b = SpectralProjectors::from_hamiltonian(h_b)?;
    let global_basis = tensor(basis_a, basis_b);

    let rho_a = partial_trace(rho_ab, (da, db), Keep::A)?;
    let rho_b = partial_trace(rho_ab, (da, db), Keep::B)?;

    let c_global = rec(rho_ab, &global_basis)?;
    let a_global = rea(rho_ab, &spect)?;
    let c_a = rec(&rho_a, basis_a)?;
    let c_b = rec(&rho_b, basis_b)?;
    let a_a = rea(&rho_a, &spect_a)?;
    let a_b = rea(&rho_b, &spect_b)?;
    let i_rho = mutual_information(rho_ab, (da, db))?;
    let i_dephased_full = mutual_information(&full_dephase(rho_ab, &global_basis)?, (da, db))?;
    let i_dephased_partial = mutual_information(&partial_dephase(rho_ab, &spect)?, (da, db))?;

    let c_identity = (c_global - (c_a + c_b - i_dephased_full + i_rho)).abs();
    let a_identity = (a_global - (a_a + a_b - i_dephased_partial + i_rho)).abs();
    if c_identity > IDENTITY_TOL || a_identity > IDENTITY_TOL {
        return Err(Error::FlowIdentity(format!(
            "bipartite additivity identities violated (C dev {c_identity:.3e}, A dev {a_identity:.3e})"
        )));
    }

    Ok(BipartiteReport {
        c_global,
        a_global,
        c_a,
        c_b,
        a_a,
        a_b,
        i_rho,
        i_dephased_full,
        i_dephased_partial,
    })
}

/// Both sides of the local-coherence balance for a covariant unitary acting
/// on a product state:
/// `Delta C_A + Delta C_B = I(rho_tilde') - I(rho_tilde) - I(rho')`.
#[derive(Clone, Copy, Debug)]
pub struct LocalIncrease {
    pub lhs: f64,
    pub rhs: f64,
}

/// Evaluates the identity above for diagonal local Hamiltonians `h_a`, `h_b`
/// and a unitary `u` commuting with `H = h_a (x) I + I (x) h_b`.
/// Non-commuting unitaries are rejected.
pub fn local_increase_identity(
    u: &ComplexMatrix,
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    h_a: &ComplexMatrix,
    h_b: &ComplexMatrix,
) -> Result<LocalIncrease> {
    let (da, db) = (rho_a.dim(), rho_b.dim());
    if h_a.dim() != da || h_b.dim() != db || u.dim() != da * db {
        return Err(Error::DimensionMismatch(u.dim(), da * db));
    }
    let h = &tensor(h_a, &ComplexMatrix::identity(db)) + &tensor(&ComplexMatrix::identity(da), h_b);
    let comm = commutator(u, &h).max_abs();
    if comm > IDENTITY_TOL {
        return Err(Error::NotCovariant(comm));
    }
    let spect = SpectralProjectors::from_hamiltonian(&h)?;
    let rho = tensor_states(rho_a, rho_b);
    let evolved = DensityMatrix::new(&(u * rho.matrix()) * &u.adjoint())?;

    let marg_a = partial_trace(&evolved, (da, db), Keep::A)?;
    let marg_b = partial_trace(&evolved, (da, db), Keep::B)?;
    let lhs = (rec_computational(&marg_a) - rec_computational(rho_a))
        + (rec_computational(&marg_b) - rec_computational(rho_b));

    let i_tilde_out = mutual_information(&partial_dephase(&evolved, &spect)?, (da, db))?;
    let i_tilde_in = mutual_information(&partial_dephase(&rho, &spect)?, (da, db))?;
    let i_out = mutual_information(&evolved, (da, db))?;
    let rhs = i_tilde_out - i_tilde_in - i_out;

    if (lhs - rhs).abs() > IDENTITY_TOL {
        return Err(Error::FlowIdentity(format!(
            "local-increase identity violated: lhs {lhs:.12e} vs rhs {rhs:.12e}"
        )));
    }
    Ok(LocalIncrease { lhs, rhs })
}

/// Binary Shannon entropy in nats with the `0 ln 0 = 0` convention.
pub fn binary_entropy(p: f64) -> f64 {
    let mut s = 0.0;
    if p > 0.0 && p < 1.0 {
        s -= p * p.ln();
        s -= (1.0 - p) * (1.0 - p).ln();
    }
    s
}
