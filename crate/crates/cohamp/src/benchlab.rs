//! Self-contained two-qubit amplification laboratory.
//!
//! Everything here concerns a pair of resonant qubits `A`, `B` with the
//! degenerate Hamiltonian `H = eps (n_A + n_B)` evolved by the
//! excitation-swapping unitary family `U(theta)`. The closed forms for the
//! evolved coherences, the opposite-bias criterion for simultaneous local
//! amplification, and the coherence-increase curve of the `pi/4` member are
//! each checked against full matrix evolution.
//!
//! State convention in this module: a qubit with bias `delta` and coherence
//! `c` is the matrix `[[(1 + delta)/2, c], [conj(c), (1 - delta)/2]]`, so
//! `delta` is the population difference between the first and second basis
//! states. Only the degeneracy structure matters here, not which label is
//! called excited.

use crate::coherence::{
    SpectralProjectors, binary_entropy, mutual_information, partial_dephase, rec_computational,
};
use crate::error::{Error, Result};
use crate::qstate::{
    C64, ComplexMatrix, DensityMatrix, IM, Keep, commutator, partial_trace, tensor,
    tensor_states, von_neumann_entropy,
};

/// Tolerance for closed-form vs matrix-evolution agreement.
pub const DUAL_ROUTE_TOL: f64 = 1e-10;

/// The two-qubit state family driven through `U(theta)`: biases, the
/// coherence ratio `c_B = alpha e^{i varphi} c_A`, and the rotation angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaFamilyParams {
    pub delta_a: f64,
    pub delta_b: f64,
    /// Magnitude of `c_B / c_A`; must be positive.
    pub alpha: f64,
    /// Phase of `c_B / c_A` in radians.
    pub varphi: f64,
    /// Rotation angle in radians.
    pub theta: f64,
}

impl ThetaFamilyParams {
    pub fn new(delta_a: f64, delta_b: f64, alpha: f64, varphi: f64, theta: f64) -> Result<Self> {
        if !(delta_a.abs() <= 1.0 && delta_b.abs() <= 1.0) {
            return Err(Error::InvalidParams("biases must lie in [-1, 1]".into()));
        }
        if !(alpha > 0.0) {
            return Err(Error::InvalidParams("alpha must be positive".into()));
        }
        Ok(Self { delta_a, delta_b, alpha, varphi, theta })
    }

    /// Builds a concrete state pair realizing the family. `|c_A|` is set to
    /// 90% of the largest value compatible with positivity of both qubits;
    /// errors when either bias forces zero coherence.
    pub fn states(&self) -> Result<(DensityMatrix, DensityMatrix)> {
        let cap_a = (1.0 - self.delta_a * self.delta_a).sqrt() / 2.0;
        let cap_b = (1.0 - self.delta_b * self.delta_b).sqrt() / 2.0;
        let mag_a = 0.9 * cap_a.min(cap_b / self.alpha);
        if mag_a <= 1e-12 {
            return Err(Error::ZeroCoherence);
        }
        let c_a = C64::new(mag_a, 0.0);
        let c_b = C64::new(0.0, self.varphi).exp() * self.alpha * c_a;
        Ok((biased_state(self.delta_a, c_a)?, biased_state(self.delta_b, c_b)?))
    }
}

/// Qubit `[[(1 + delta)/2, c], [conj(c), (1 - delta)/2]]`.
pub fn biased_state(delta: f64, c: C64) -> Result<DensityMatrix> {
    let mut m = ComplexMatrix::zeros(2);
    m.set(0, 0, C64::new((1.0 + delta) / 2.0, 0.0));
    m.set(1, 1, C64::new((1.0 - delta) / 2.0, 0.0));
    m.set(0, 1, c);
    m.set(1, 0, c.conj());
    DensityMatrix::new(m)
}

/// Energy-preserving unitary of the resonant pair:
/// identity on `{|00>, |11>}`, a `cos/-i sin` rotation on `{|01>, |10>}`.
/// `theta = pi/4` is the balanced-swap member.
pub fn theta_unitary(theta: f64) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(4);
    let c = C64::new(theta.cos(), 0.0);
    let s = -IM * theta.sin();
    u.set(1, 1, c);
    u.set(2, 2, c);
    u.set(1, 2, s);
    u.set(2, 1, s);
    u
}

/// Degenerate pair Hamiltonian `eps (n_A + n_B)` with unit quantum.
pub fn pair_hamiltonian() -> ComplexMatrix {
    let n = ComplexMatrix::diag(&[0.0, 1.0]);
    &tensor(&n, &ComplexMatrix::identity(2)) + &tensor(&ComplexMatrix::identity(2), &n)
}

/// Coherence magnification of both qubits under `U(theta)`, closed form:
/// `|c'_A|/|c_A| = |cos t + i d_A alpha e^{i phi} sin t|` and
/// `|c'_B|/|c_B| = |cos t + i (d_B/alpha) e^{-i phi} sin t|`.
pub fn coherence_ratios(p: &ThetaFamilyParams) -> Result<(f64, f64)> {
    if !(p.alpha > 0.0) {
        return Err(Error::ZeroCoherence);
    }
    let phase = C64::new(0.0, p.varphi).exp();
    let ct = C64::new(p.theta.cos(), 0.0);
    let st = p.theta.sin();
    let ra = (ct + IM * p.delta_a * p.alpha * phase * st).norm();
    let rb = (ct + IM * (p.delta_b / p.alpha) * phase.conj() * st).norm();
    Ok((ra, rb))
}

/// The same ratios from explicit state construction, unitary evolution and
/// partial traces.
pub fn coherence_ratios_matrix(p: &ThetaFamilyParams) -> Result<(f64, f64)> {
    let (rho_a, rho_b) = p.states()?;
    let c_a = rho_a.get(0, 1).norm();
    let c_b = rho_b.get(0, 1).norm();
    let u = theta_unitary(p.theta);
    let rho = tensor_states(&rho_a, &rho_b);
    let evolved = DensityMatrix::new(&(&u * rho.matrix()) * &u.adjoint())?;
    let out_a = partial_trace(&evolved, (2, 2), Keep::A)?;
    let out_b = partial_trace(&evolved, (2, 2), Keep::B)?;
    Ok((out_a.get(0, 1).norm() / c_a, out_b.get(0, 1).norm() / c_b))
}

/// Whether any `(alpha, varphi, theta)` lets both local coherences grow:
/// true exactly when the biases have opposite signs.
pub fn simultaneous_increase_possible(delta_a: f64, delta_b: f64) -> bool {
    delta_a * delta_b < 0.0
}

/// The factorized amplification conditions: with `r = sin(varphi) cot(theta)`
/// and `kappa = r + sqrt(r^2 + 1)`, qubit A amplifies iff
/// `(d_A alpha - kappa)(d_A alpha + 1/kappa) > 0` and qubit B iff
/// `(d_B/alpha - 1/kappa)(d_B/alpha + kappa) > 0`. Used to cross-validate
/// the direct ratio conditions.
pub fn kappa_conditions(p: &ThetaFamilyParams) -> Result<(bool, bool)> {
    let st = p.theta.sin();
    if st.abs() < 1e-12 {
        return Ok((false, false));
    }
    let r = p.varphi.sin() * p.theta.cos() / st;
    let kappa = r + (r * r + 1.0).sqrt();
    let xa = p.delta_a * p.alpha;
    let xb = p.delta_b / p.alpha;
    Ok(((xa - kappa) * (xa + 1.0 / kappa) > 0.0, (xb - 1.0 / kappa) * (xb + kappa) > 0.0))
}

/// Net change of the summed local coherences for the `pi/4` member acting on
/// `rho_A = [[1/2, c], [c, 1/2]]`, `rho_B` the second basis state:
/// `2 h(1/4) - h(1/2) - 2 h(p) + h(1/2 + c)` with
/// `p = 1/2 + sqrt(1 + 8 c^2)/4`.
///
/// The closed form is checked against full matrix evolution to
/// [`DUAL_ROUTE_TOL`].
pub fn delta_c_curve(c: f64) -> Result<f64> {
    if !(-0.5..=0.5).contains(&c) {
        return Err(Error::InvalidParams("c must lie in [-1/2, 1/2]".into()));
    }
    let p = 0.5 + (1.0 + 8.0 * c * c).sqrt() / 4.0;
    let closed = 2.0 * binary_entropy(0.25) - binary_entropy(0.5) - 2.0 * binary_entropy(p)
        + binary_entropy(0.5 + c);

    let rho_a = biased_state(0.0, C64::new(c, 0.0))?;
    let rho_b = biased_state(-1.0, C64::new(0.0, 0.0))?;
    let u = theta_unitary(std::f64::consts::FRAC_PI_4);
    let rho = tensor_states(&rho_a, &rho_b);
    let evolved = DensityMatrix::new(&(&u * rho.matrix()) * &u.adjoint())?;
    let out_a = partial_trace(&evolved, (2, 2), Keep::A)?;
    let out_b = partial_trace(&evolved, (2, 2), Keep::B)?;
    let matrix_route = rec_computational(&out_a) + rec_computational(&out_b)
        - rec_computational(&rho_a)
        - rec_computational(&rho_b);
    if (closed - matrix_route).abs() > DUAL_ROUTE_TOL {
        return Err(Error::FlowIdentity(format!(
            "delta-C routes disagree at c = {c}: closed {closed:.12e} vs matrix {matrix_route:.12e}"
        )));
    }
    Ok(closed)
}

/// Zero crossing of [`delta_c_curve`], located by bisection on `[0.4, 0.5]`
/// to an interval of width 1e-6.
pub fn delta_c_root() -> Result<f64> {
    let (mut lo, mut hi) = (0.4, 0.5);
    let f_lo = delta_c_curve(lo)?;
    let f_hi = delta_c_curve(hi)?;
    if f_lo <= 0.0 || f_hi >= 0.0 {
        return Err(Error::Numerical("bracket [0.4, 0.5] does not straddle the root".into()));
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if delta_c_curve(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coherence and asymmetry through the four stages of one covariant
/// evolution: summed locals of the inputs, global before, global after,
/// summed locals of the outputs.
#[derive(Clone, Copy, Debug)]
pub struct StageDiagram {
    pub rec_stages: [f64; 4],
    pub rea_stages: [f64; 4],
}

/// Builds the diagram for product input `rho_A (x) rho_B`, a unitary `u`
/// commuting with `H = h_a (x) I + I (x) h_b` (diagonal locals), measured in
/// the computational basis.
///
/// Verifies that the REA is constant across stages 2-3 (covariance) and
/// that the REC drop at separation equals `I(rho') - I(rho_bar')` and is
/// never negative.
pub fn stage_diagram(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    u: &ComplexMatrix,
    h_a: &ComplexMatrix,
    h_b: &ComplexMatrix,
) -> Result<StageDiagram> {
    let h = &tensor(h_a, &ComplexMatrix::identity(2)) + &tensor(&ComplexMatrix::identity(2), h_b);
    let comm = commutator(u, &h).max_abs();
    if comm > 1e-10 {
        return Err(Error::NotCovariant(comm));
    }
    let spect = SpectralProjectors::from_hamiltonian(&h)?;
    let spect_a = SpectralProjectors::from_hamiltonian(h_a)?;
    let spect_b = SpectralProjectors::from_hamiltonian(h_b)?;

    let local_measures = |x: &DensityMatrix, spect_local: &SpectralProjectors| -> Result<(f64, f64)> {
        let c = rec_computational(x);
        let a = von_neumann_entropy(&partial_dephase(x, spect_local)?) - von_neumann_entropy(x);
        Ok((c, a))
    };
    let global_measures = |x: &DensityMatrix| -> Result<(f64, f64)> {
        let c = rec_computational(x);
        let a = von_neumann_entropy(&partial_dephase(x, &spect)?) - von_neumann_entropy(x);
        Ok((c, a))
    };

    let (c_a0, a_a0) = local_measures(rho_a, &spect_a)?;
    let (c_b0, a_b0) = local_measures(rho_b, &spect_b)?;
    let rho = tensor_states(rho_a, rho_b);
    let (c1, a1) = global_measures(&rho)?;
    let evolved = DensityMatrix::new(&(u * rho.matrix()) * &u.adjoint())?;
    let (c2, a2) = global_measures(&evolved)?;
    let out_a = partial_trace(&evolved, (2, 2), Keep::A)?;
    let out_b = partial_trace(&evolved, (2, 2), Keep::B)?;
    let (c_a3, a_a3) = local_measures(&out_a, &spect_a)?;
    let (c_b3, a_b3) = local_measures(&out_b, &spect_b)?;

    if (a2 - a1).abs() > 1e-10 {
        return Err(Error::FlowIdentity(format!(
            "covariant evolution changed the REA by {:.3e}",
            a2 - a1
        )));
    }
    // REC drop when the pair is separated: I(rho') - I(rho_bar') >= 0.
    let i_out = mutual_information(&evolved, (2, 2))?;
    let i_out_dephased =
        mutual_information(&crate::coherence::full_dephase_computational(&evolved), (2, 2))?;
    let drop = c2 - (c_a3 + c_b3);
    if (drop - (i_out - i_out_dephased)).abs() > 1e-10 || drop < -1e-10 {
        return Err(Error::FlowIdentity(format!(
            "separation REC drop {drop:.3e} does not match I(rho') - I(rho_bar') = {:.3e}",
            i_out - i_out_dephased
        )));
    }

    Ok(StageDiagram {
        rec_stages: [c_a0 + c_b0, c1, c2, c_a3 + c_b3],
        rea_stages: [a_a0 + a_b0, a1, a2, a_a3 + a_b3],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::expm_hermitian_generator;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const LN2: f64 = std::f64::consts::LN_2;
    const PI: f64 = std::f64::consts::PI;

    fn c64(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_family(rng: &mut impl Rng) -> ThetaFamilyParams {
        ThetaFamilyParams::new(
            rng.gen_range(-0.95..0.95),
            rng.gen_range(-0.95..0.95),
            rng.gen_range(0.3..3.0),
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(0.01..PI - 0.01),
        )
        .unwrap()
    }

    #[test]
    fn theta_unitary_members() {
        assert!(theta_unitary(0.0).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = theta_unitary(PI / 4.0);
        assert!((u.get(1, 1) - c64(s, 0.0)).norm() < 1e-15);
        assert!((u.get(1, 2) - c64(0.0, -s)).norm() < 1e-15);
        assert!(commutator(&u, &pair_hamiltonian()).max_abs() < 1e-12);
        // unitary
        let g = &u.adjoint() * &u;
        assert!(g.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);
        // generated by the excitation swap
        let mut swap = ComplexMatrix::zeros(4);
        swap.set(1, 2, c64(1.0, 0.0));
        swap.set(2, 1, c64(1.0, 0.0));
        let theta = 0.77;
        let via_exp = expm_hermitian_generator(&swap, theta).unwrap();
        assert!(via_exp.max_abs_diff(&theta_unitary(theta)) < 1e-12);
    }

    #[test]
    fn ratios_identity_at_zero_angle() {
        let p = ThetaFamilyParams::new(-0.4, 0.7, 1.3, 0.9, 0.0).unwrap();
        let (ra, rb) = coherence_ratios(&p).unwrap();
        assert!((ra - 1.0).abs() < 1e-14 && (rb - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ratios_closed_form_matches_matrix_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..300 {
            let p = random_family(&mut rng);
            let closed = coherence_ratios(&p).unwrap();
            let matrix = coherence_ratios_matrix(&p).unwrap();
            assert!((closed.0 - matrix.0).abs() < 1e-12, "{closed:?} vs {matrix:?}");
            assert!((closed.1 - matrix.1).abs() < 1e-12);
        }
    }

    #[test]
    fn opposite_bias_instance_has_common_amplification_window() {
        let mut found = false;
        for k in 1..200 {
            let theta = k as f64 * PI / 400.0;
            let p = ThetaFamilyParams::new(-0.9, 0.8, 1.0, PI / 2.0, theta).unwrap();
            let (ra, rb) = coherence_ratios(&p).unwrap();
            if ra > 1.0 && rb > 1.0 {
                found = true;
                break;
            }
        }
        assert!(found);
    }

    #[test]
    fn bias_sign_predicate() {
        assert!(simultaneous_increase_possible(-0.9, 0.8));
        assert!(!simultaneous_increase_possible(0.5, 0.5));
        assert!(!simultaneous_increase_possible(0.0, 0.7));
    }

    #[test]
    fn kappa_conditions_match_direct_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for _ in 0..5000 {
            let p = random_family(&mut rng);
            let (ra, rb) = coherence_ratios(&p).unwrap();
            let (ka, kb) = kappa_conditions(&p).unwrap();
            // strict inequalities away from the boundary
            if (ra - 1.0).abs() > 1e-9 {
                assert_eq!(ra > 1.0, ka, "{p:?}");
            }
            if (rb - 1.0).abs() > 1e-9 {
                assert_eq!(rb > 1.0, kb, "{p:?}");
            }
        }
    }

    #[test]
    fn same_sign_biases_never_amplify_together() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..20_000 {
            let mut p = random_family(&mut rng);
            p.delta_b = p.delta_b.abs() * p.delta_a.signum();
            let (ra, rb) = coherence_ratios(&p).unwrap();
            assert!(!(ra > 1.0 + 1e-12 && rb > 1.0 + 1e-12), "{p:?}");
        }
    }

    #[test]
    fn delta_c_curve_shape_and_root() {
        assert!(delta_c_curve(0.0).unwrap().abs() < 1e-14);
        for k in 1..=45 {
            let c = k as f64 * 0.01;
            assert!(delta_c_curve(c).unwrap() > 0.0, "c = {c}");
        }
        for k in 46..=50 {
            let c = k as f64 * 0.01;
            assert!(delta_c_curve(c).unwrap() < 0.0, "c = {c}");
        }
        let root = delta_c_root().unwrap();
        assert!((0.4508..=0.4518).contains(&root), "root {root}");
    }

    #[test]
    fn dephased_mutual_information_ingredient() {
        // I(rho_tilde') of the pi/4 example is c-independent:
        // 2 h(1/4) - h(1/2).
        let rho_a = biased_state(0.0, c64(0.35, 0.0)).unwrap();
        let rho_b = biased_state(-1.0, c64(0.0, 0.0)).unwrap();
        let u = theta_unitary(PI / 4.0);
        let rho = tensor_states(&rho_a, &rho_b);
        let evolved = DensityMatrix::new(&(&u * rho.matrix()) * &u.adjoint()).unwrap();
        let spect = SpectralProjectors::from_hamiltonian(&pair_hamiltonian()).unwrap();
        let tilde = partial_dephase(&evolved, &spect).unwrap();
        let i_tilde = mutual_information(&tilde, (2, 2)).unwrap();
        let expect = 2.0 * binary_entropy(0.25) - binary_entropy(0.5);
        assert!((i_tilde - expect).abs() < 1e-12);
    }

    #[test]
    fn stage_diagram_identity_unitary_is_flat() {
        let rho_a = biased_state(0.3, c64(0.2, 0.1)).unwrap();
        let rho_b = biased_state(-0.5, c64(0.1, 0.0)).unwrap();
        let n = ComplexMatrix::diag(&[0.0, 1.0]);
        let d = stage_diagram(&rho_a, &rho_b, &ComplexMatrix::identity(4), &n, &n).unwrap();
        assert!((d.rec_stages[1] - d.rec_stages[2]).abs() < 1e-12);
        assert!((d.rea_stages[1] - d.rea_stages[2]).abs() < 1e-12);
        assert!((d.rec_stages[0] - d.rec_stages[3]).abs() < 1e-12);
        // products: local sums equal the global REC
        assert!((d.rec_stages[0] - d.rec_stages[1]).abs() < 1e-12);
    }

    #[test]
    fn stage_diagram_of_the_reference_example() {
        let c = 0.35;
        let rho_a = biased_state(0.0, c64(c, 0.0)).unwrap();
        let rho_b = biased_state(-1.0, c64(0.0, 0.0)).unwrap();
        let n = ComplexMatrix::diag(&[0.0, 1.0]);
        let u = theta_unitary(PI / 4.0);
        let d = stage_diagram(&rho_a, &rho_b, &u, &n, &n).unwrap();
        // REC rises under the evolution by exactly ln2/2 for this family
        assert!((d.rec_stages[2] - d.rec_stages[1] - 0.5 * LN2).abs() < 1e-12);
        // REA flat under evolution, rising at separation
        assert!((d.rea_stages[2] - d.rea_stages[1]).abs() < 1e-10);
        assert!(d.rea_stages[3] >= d.rea_stages[2] - 1e-12);
        // net local change equals the closed-form curve
        let net = d.rec_stages[3] - d.rec_stages[0];
        assert!((net - delta_c_curve(c).unwrap()).abs() < 1e-10);
        assert!(net > 0.0);
    }

    #[test]
    fn stage_diagram_rea_conserved_for_random_covariant_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let n = ComplexMatrix::diag(&[0.0, 1.0]);
        for _ in 0..100 {
            let p = random_family(&mut rng);
            let (rho_a, rho_b) = p.states().unwrap();
            let u = theta_unitary(rng.gen_range(0.0..PI));
            let d = stage_diagram(&rho_a, &rho_b, &u, &n, &n).unwrap();
            assert!((d.rea_stages[1] - d.rea_stages[2]).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_bias_rejects_state_construction() {
        let p = ThetaFamilyParams::new(1.0, 0.5, 1.0, 0.0, 0.3).unwrap();
        assert!(matches!(p.states(), Err(Error::ZeroCoherence)));
    }
}
