//! The two-qubit machine: Hamiltonian, thermal rates, Liouvillian assembly,
//! and stationary-state solution.
//!
//! The machine consists of two non-interacting qubits with gaps `E1 < E2`,
//! each coupled to its own thermal bath. Its middle levels
//! `{|0>_v = |10>, |1>_v = |01>}` form the virtual qubit with gap `E2 - E1`.
//! A stream of resonant two-level atoms arriving at Poisson rate `r` with
//! effective interaction strength `phi` drives the machine; averaged over
//! arrivals the machine obeys a Lindblad master equation in the interaction
//! picture whose generator is assembled here as a 16x16 superoperator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{
    C64, ComplexMatrix, DensityMatrix, IM, superop_left, superop_right, superop_sandwich, unvec,
    vectorize,
};

/// Singular-value gap below which the stationary space counts as degenerate.
pub const NULLSPACE_GAP: f64 = 1e-8;
/// Acceptable stationarity residual `|L(pi)|_F` of a produced steady state.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Steady-state coherences outside the virtual-qubit block must vanish to
/// this tolerance.
pub const BLOCK_TOL: f64 = 1e-8;

/// Lowering operator of machine qubit 1 in the four-level basis.
pub fn lowering_qubit1() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    m.set(0, 2, C64::new(1.0, 0.0));
    m.set(1, 3, C64::new(1.0, 0.0));
    m
}

/// Lowering operator of machine qubit 2.
pub fn lowering_qubit2() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    m.set(0, 1, C64::new(1.0, 0.0));
    m.set(2, 3, C64::new(1.0, 0.0));
    m
}

/// Virtual-qubit lowering operator `sigma_v = sigma_1^dag sigma_2 = |10><01|`.
pub fn virtual_lowering() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    m.set(2, 1, C64::new(1.0, 0.0));
    m
}

/// Machine Hamiltonian `diag(0, E2, E1, E1 + E2)` for arbitrary gaps.
pub fn machine_hamiltonian(e1: f64, e2: f64) -> ComplexMatrix {
    ComplexMatrix::diag(&[0.0, e2, e1, e1 + e2])
}

/// Atom Hamiltonian `diag(0, E2 - E1)`, resonant with the virtual qubit.
pub fn atom_hamiltonian(e1: f64, e2: f64) -> ComplexMatrix {
    ComplexMatrix::diag(&[0.0, e2 - e1])
}

/// Virtual inverse temperature `(beta2 E2 - beta1 E1) / (E2 - E1)`; negative
/// values mean population inversion of the virtual qubit.
pub fn virtual_beta(beta1: f64, beta2: f64, e1: f64, e2: f64) -> f64 {
    (beta2 * e2 - beta1 * e1) / (e2 - e1)
}

/// Bath rates `(gamma_down, gamma_up)` for a qubit of gap `e` coupled to a
/// bath at inverse temperature `beta` with spontaneous-emission rate
/// `gamma0`. Detailed balance `gamma_down = gamma_up * exp(beta e)` holds by
/// construction.
pub fn thermal_rates(beta: f64, e: f64, gamma0: f64) -> Result<(f64, f64)> {
    let be = beta * e;
    if be <= 0.0 {
        return Err(Error::InfiniteTemperature(be));
    }
    let x = be.exp();
    if !x.is_finite() {
        // zero-temperature limit: no absorption, bare emission
        return Ok((gamma0, 0.0));
    }
    let n_th = 1.0 / be.exp_m1();
    let up = gamma0 * n_th;
    let down = up * x;
    Ok((down, up))
}

/// All machine constants. Energies and rates are dimensionless with
/// `hbar = k_B = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineParams {
    pub e1: f64,
    pub e2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma0_1: f64,
    pub gamma0_2: f64,
    pub r: f64,
    pub phi: f64,
}

impl MachineParams {
    pub fn new(
        e1: f64,
        e2: f64,
        beta1: f64,
        beta2: f64,
        gamma0_1: f64,
        gamma0_2: f64,
        r: f64,
        phi: f64,
    ) -> Result<Self> {
        let p = Self { e1, e2, beta1, beta2, gamma0_1, gamma0_2, r, phi };
        p.validate()?;
        Ok(p)
    }

    /// Reference operating point used by the CLI defaults and the examples:
    /// `E1 = 1.5, E2 = 2.5, beta1 = 1.2, beta2 = 0.24, gamma0 = 0.0025,
    /// r = 2.0, phi = 0.02`.
    pub fn reference() -> Self {
        Self {
            e1: 1.5,
            e2: 2.5,
            beta1: 1.2,
            beta2: 0.24,
            gamma0_1: 0.0025,
            gamma0_2: 0.0025,
            r: 2.0,
            phi: 0.02,
        }
    }

    /// Hard structural invariants. The soft regime conditions live in
    /// [`validate_regime`].
    pub fn validate(&self) -> Result<()> {
        if !(self.e1 > 0.0) || !(self.e2 > self.e1) {
            return Err(Error::InvalidParams(format!(
                "need E2 > E1 > 0, got E1 = {}, E2 = {}",
                self.e1, self.e2
            )));
        }
        if !(self.beta1 >= 0.0) || !(self.beta2 >= 0.0) {
            return Err(Error::InvalidParams("inverse temperatures must be >= 0".into()));
        }
        if !(self.gamma0_1 > 0.0) || !(self.gamma0_2 > 0.0) {
            return Err(Error::InvalidParams("spontaneous-emission rates must be > 0".into()));
        }
        if !(self.r >= 0.0) {
            return Err(Error::InvalidParams("atom arrival rate must be >= 0".into()));
        }
        if !(self.phi >= 0.0) {
            return Err(Error::InvalidParams("interaction strength must be >= 0".into()));
        }
        Ok(())
    }

    pub fn virtual_temperature(&self) -> f64 {
        virtual_beta(self.beta1, self.beta2, self.e1, self.e2)
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        machine_hamiltonian(self.e1, self.e2)
    }

    pub fn atom_gap(&self) -> f64 {
        self.e2 - self.e1
    }
}

/// Soft self-consistency warnings for the perturbative regime.
#[derive(Clone, Debug, PartialEq)]
pub enum RegimeWarning {
    /// `phi^2 > 0.01 (E2 - E1)`: the interaction is not weak against the
    /// virtual gap.
    PhiTooLarge { phi2: f64, limit: f64 },
    /// `gamma0_k > 0.01 E_k`: bath coupling of qubit `k` is not weak.
    BathCouplingTooStrong { qubit: u8, gamma0: f64, limit: f64 },
    /// `r phi^2 > 10 gamma0_k`: the atom-induced rate leaves the
    /// partial-relaxation sanity window.
    ArrivalRateOutsideWindow { qubit: u8, r_phi2: f64, limit: f64 },
    /// `beta1 < beta2`: the reference ordering (bath 1 cold) is reversed;
    /// Carnot-factor terms change sign.
    TemperatureOrderReversed,
}

impl std::fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PhiTooLarge { phi2, limit } => {
                write!(f, "phi^2 = {phi2:.3e} exceeds 0.01 (E2 - E1) = {limit:.3e}")
            }
            Self::BathCouplingTooStrong { qubit, gamma0, limit } => {
                write!(f, "gamma0_{qubit} = {gamma0:.3e} exceeds 0.01 E_{qubit} = {limit:.3e}")
            }
            Self::ArrivalRateOutsideWindow { qubit, r_phi2, limit } => {
                write!(
                    f,
                    "r phi^2 = {r_phi2:.3e} exceeds 10 gamma0_{qubit} = {limit:.3e} (partial-relaxation window)"
                )
            }
            Self::TemperatureOrderReversed => {
                write!(f, "beta1 < beta2: reference bath ordering reversed")
            }
        }
    }
}

/// Checks the weak-coupling and partial-relaxation windows. Never errors.
pub fn validate_regime(p: &MachineParams) -> Vec<RegimeWarning> {
    let mut warnings = Vec::new();
    let phi2 = p.phi * p.phi;
    let limit = 0.01 * (p.e2 - p.e1);
    if phi2 > limit {
        warnings.push(RegimeWarning::PhiTooLarge { phi2, limit });
    }
    for (qubit, gamma0, e) in [(1u8, p.gamma0_1, p.e1), (2u8, p.gamma0_2, p.e2)] {
        let limit = 0.01 * e;
        if gamma0 > limit {
            warnings.push(RegimeWarning::BathCouplingTooStrong { qubit, gamma0, limit });
        }
    }
    let r_phi2 = p.r * phi2;
    for (qubit, gamma0) in [(1u8, p.gamma0_1), (2u8, p.gamma0_2)] {
        let limit = 10.0 * gamma0;
        if r_phi2 > limit {
            warnings.push(RegimeWarning::ArrivalRateOutsideWindow { qubit, r_phi2, limit });
        }
    }
    if p.beta1 < p.beta2 {
        warnings.push(RegimeWarning::TemperatureOrderReversed);
    }
    warnings
}

/// First and second moments of the atom state entering the machine
/// generator.
#[derive(Clone, Copy, Debug)]
pub struct AtomMoments {
    /// `<sigma_a sigma_a^dag>`: ground population.
    pub ground: f64,
    /// `<sigma_a^dag sigma_a>`: excited population.
    pub excited: f64,
    /// `<sigma_a^dag> = <0|rho|1>`.
    pub sigma_dag: C64,
}

impl AtomMoments {
    pub fn of(rho_a: &DensityMatrix) -> Result<Self> {
        if rho_a.dim() != 2 {
            return Err(Error::DimensionMismatch(rho_a.dim(), 2));
        }
        Ok(Self {
            ground: rho_a.get(0, 0).re,
            excited: rho_a.get(1, 1).re,
            sigma_dag: rho_a.get(0, 1),
        })
    }

    /// `<sigma_a>`, the conjugate moment.
    pub fn sigma(&self) -> C64 {
        self.sigma_dag.conj()
    }
}

/// Lindblad dissipator `D(rho)` with jump operator `sigma` and rates
/// `(gamma_down, gamma_up)`, applied directly to a matrix.
pub fn dissipator_apply(
    sigma: &ComplexMatrix,
    gamma_down: f64,
    gamma_up: f64,
    rho: &ComplexMatrix,
) -> ComplexMatrix {
    let sd = sigma.adjoint();
    let num = &sd * sigma;
    let num_rev = sigma * &sd;
    let jump_down = &(&(sigma * rho) * &sd) - &(&(&num * rho) + &(rho * &num)).scale_re(0.5);
    let jump_up = &(&(&sd * rho) * sigma) - &(&(&num_rev * rho) + &(rho * &num_rev)).scale_re(0.5);
    &jump_down.scale_re(gamma_down) + &jump_up.scale_re(gamma_up)
}

/// Superoperator form of [`dissipator_apply`] under column-stacking.
pub fn dissipator_superop(sigma: &ComplexMatrix, gamma_down: f64, gamma_up: f64) -> ComplexMatrix {
    let sd = sigma.adjoint();
    let num = &sd * sigma;
    let num_rev = sigma * &sd;
    let down = &superop_sandwich(sigma, sigma)
        - &(&superop_left(&num) + &superop_right(&num)).scale_re(0.5);
    let up = &superop_sandwich(&sd, &sd)
        - &(&superop_left(&num_rev) + &superop_right(&num_rev)).scale_re(0.5);
    &down.scale_re(gamma_down) + &up.scale_re(gamma_up)
}

/// The machine generator as a 16x16 superoperator on column-vectorized
/// 4x4 states. Trace preserving by construction; generates a completely
/// positive semigroup (Lindblad form).
#[derive(Clone, Debug)]
pub struct Liouvillian {
    matrix: ComplexMatrix,
}

impl Liouvillian {
    /// Wraps an externally built superoperator after checking trace
    /// preservation (the row vectorization of the identity must be a left
    /// null vector).
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 16 {
            return Err(Error::DimensionMismatch(matrix.dim(), 16));
        }
        let defect = trace_preservation_defect(&matrix);
        if defect > 1e-10 {
            return Err(Error::Numerical(format!(
                "superoperator is not trace preserving (defect {defect:.3e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Applies the generator to a 4x4 matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let v = vectorize(rho);
        let n = 16;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (r, o) in out.iter_mut().enumerate() {
            for (c, x) in v.iter().enumerate() {
                if x.norm_sqr() > 0.0 {
                    *o += self.matrix.get(r, c) * x;
                }
            }
        }
        unvec(&out, 4)
    }
}

fn trace_preservation_defect(sup: &ComplexMatrix) -> f64 {
    let id = vectorize(&ComplexMatrix::identity(4));
    let mut worst = 0.0f64;
    for c in 0..16 {
        let mut acc = C64::new(0.0, 0.0);
        for (r, idr) in id.iter().enumerate() {
            acc += idr.conj() * sup.get(r, c);
        }
        worst = worst.max(acc.norm());
    }
    worst
}

/// Assembles the machine generator
/// `L(rho) = -i r phi [V_m, rho] + D_v(rho) + D_1(rho) + D_2(rho)`
/// for an atom stream prepared in `rho_a`, in the interaction picture.
///
/// `V_m = sigma_v <sigma_a^dag> + sigma_v^dag <sigma_a>`; the atom-induced
/// dissipator has rates `gamma_down_v = r phi^2 <sigma_a sigma_a^dag>` and
/// `gamma_up_v = r phi^2 <sigma_a^dag sigma_a>`.
pub fn build_liouvillian(p: &MachineParams, rho_a: &DensityMatrix) -> Result<Liouvillian> {
    p.validate()?;
    let m = AtomMoments::of(rho_a)?;
    let (gd1, gu1) = thermal_rates(p.beta1, p.e1, p.gamma0_1)?;
    let (gd2, gu2) = thermal_rates(p.beta2, p.e2, p.gamma0_2)?;
    let r_phi2 = p.r * p.phi * p.phi;

    let sv = virtual_lowering();
    let coherent = {
        let vm = &sv.scale(m.sigma_dag) + &sv.adjoint().scale(m.sigma());
        let sup = &superop_left(&vm) - &superop_right(&vm);
        sup.scale(-IM * (p.r * p.phi))
    };
    let mut l = coherent;
    l = &l + &dissipator_superop(&sv, r_phi2 * m.ground, r_phi2 * m.excited);
    l = &l + &dissipator_superop(&lowering_qubit1(), gd1, gu1);
    l = &l + &dissipator_superop(&lowering_qubit2(), gd2, gu2);
    Liouvillian::from_matrix(l)
}

/// Stationary state of the machine with its virtual-qubit coherence.
#[derive(Clone, Debug)]
pub struct MachineSteadyState {
    pub rho: DensityMatrix,
    pub pi00: f64,
    pub pi01: f64,
    pub pi10: f64,
    pub pi11: f64,
    /// Virtual-qubit coherence `pi_v = Tr[sigma_v pi] = <01|pi|10>`.
    pub pi_v: C64,
    /// Stationarity residual `|L(pi)|_F` of the returned state.
    pub residual: f64,
}

/// Solves `L(pi) = 0` from the right-singular vector of the smallest
/// singular value, Hermitized, positivity-clamped, and renormalized.
///
/// Errors if the nullspace is not one-dimensional within the singular-value
/// gap [`NULLSPACE_GAP`], if the residual exceeds [`RESIDUAL_TOL`], or if
/// coherences appear outside the virtual-qubit block.
pub fn steady_state(l: &Liouvillian) -> Result<MachineSteadyState> {
    // The augmented eigenproblem counts left and right null directions
    // together: a unique steady state shows up as exactly two near-zero
    // values (the trace row and the stationary column).
    let (below, v) = crate::qstate::right_nullspace(l.matrix(), NULLSPACE_GAP);
    if below != 2 {
        return Err(Error::DegenerateNullspace(below / 2));
    }
    let m = unvec(&v, 4).hermitize();
    let tr = m.trace().re;
    if tr.abs() < 1e-8 {
        return Err(Error::Numerical(format!(
            "nullspace element has near-zero trace ({tr:.3e})"
        )));
    }
    let rho = DensityMatrix::new(m.scale_re(1.0 / tr))?;

    let residual = l.apply(rho.matrix()).frobenius_norm();
    if residual > RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "steady-state residual {residual:.3e} exceeds {RESIDUAL_TOL:.1e}"
        )));
    }
    let mut off_block = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            if i != j && !((i == 1 && j == 2) || (i == 2 && j == 1)) {
                off_block = off_block.max(rho.get(i, j).norm());
            }
        }
    }
    if off_block > BLOCK_TOL {
        return Err(Error::Numerical(format!(
            "steady state has coherence outside the virtual-qubit block ({off_block:.3e})"
        )));
    }

    Ok(MachineSteadyState {
        pi00: rho.get(0, 0).re,
        pi01: rho.get(1, 1).re,
        pi10: rho.get(2, 2).re,
        pi11: rho.get(3, 3).re,
        pi_v: rho.get(1, 2),
        residual,
        rho,
    })
}

/// Convenience: build the generator for `(p, rho_a)` and solve it.
pub fn solve_steady_state(p: &MachineParams, rho_a: &DensityMatrix) -> Result<MachineSteadyState> {
    steady_state(&build_liouvillian(p, rho_a)?)
}

/// Product Gibbs state of the two machine qubits at their own bath
/// temperatures (the `r = 0` fixed point).
pub fn bare_thermal_state(p: &MachineParams) -> Result<DensityMatrix> {
    let mut diag = [0.0f64; 4];
    let p1 = 1.0 / (1.0 + (p.beta1 * p.e1).exp()); // excited weight, qubit 1
    let p2 = 1.0 / (1.0 + (p.beta2 * p.e2).exp());
    diag[0] = (1.0 - p1) * (1.0 - p2);
    diag[1] = (1.0 - p1) * p2;
    diag[2] = p1 * (1.0 - p2);
    diag[3] = p1 * p2;
    DensityMatrix::new(ComplexMatrix::diag(&diag))
}
