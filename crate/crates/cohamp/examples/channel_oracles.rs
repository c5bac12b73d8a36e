//! The machine-to-atom channel, two ways: the exact unitary-dilation map
//! and its second-order expansion, with the flows that tie them to the
//! thermodynamic bookkeeping.
//!
//! ```sh
//! cargo run --example channel_oracles
//! ```

use cohamp::atomchannel::{AtomChannel, ChannelVariant, exact_joint_update, interaction_generator};
use cohamp::coherence::{SpectralProjectors, rea};
use cohamp::machine::{MachineParams, atom_hamiltonian, machine_hamiltonian, solve_steady_state};
use cohamp::qstate::{
    C64, ComplexMatrix, DensityMatrix, eigh, tensor, tensor_states, trace_norm,
};
use cohamp::thermo::{EntropyMethod, atom_entropy_rate, flow_report_at};

fn main() -> cohamp::Result<()> {
    let p = MachineParams::reference();
    let atom = DensityMatrix::qubit(-0.6, C64::new(0.2, 0.0))?;
    let pi = solve_steady_state(&p, &atom)?;

    // The perturbative map tracks the exact one at third order in phi.
    println!("exact vs perturbative channel (fixed machine state):");
    for phi in [0.01, 0.02, 0.04, 0.08] {
        let exact = AtomChannel::new(&pi.rho, phi, ChannelVariant::Exact)?;
        let pert = AtomChannel::new(&pi.rho, phi, ChannelVariant::Perturbative)?;
        let d = trace_norm(&(exact.apply(&atom)?.matrix() - pert.apply(&atom)?.matrix()));
        println!("  phi = {phi:<5}: |A_ex - A_pt|_tr = {d:.3e}   /phi^3 = {:.4}", d / phi.powi(3));
    }

    // Complete positivity of the exact channel, read off the Choi matrix.
    let exact = AtomChannel::new(&pi.rho, 0.05, ChannelVariant::Exact)?;
    let choi = exact.choi_matrix()?;
    let eigs = eigh(&choi)?.values;
    println!("\nChoi eigenvalues of the exact channel: {:?}", eigs);

    // The joint kick conserves energy and global asymmetry exactly.
    let h = &tensor(&machine_hamiltonian(p.e1, p.e2), &ComplexMatrix::identity(2))
        + &tensor(&ComplexMatrix::identity(4), &atom_hamiltonian(p.e1, p.e2));
    let spect = SpectralProjectors::from_hamiltonian(&h)?;
    let joint_in = tensor_states(&pi.rho, &atom);
    let joint_out = exact_joint_update(&pi.rho, &atom, 0.3)?;
    println!("\njoint kick at phi = 0.3:");
    println!(
        "  energy drift    = {:+.3e}",
        h.expectation(joint_out.matrix()).re - h.expectation(joint_in.matrix()).re
    );
    println!("  REA drift       = {:+.3e}", rea(&joint_out, &spect)? - rea(&joint_in, &spect)?);
    println!(
        "  interaction generator commutes with H: |[V, H]| = {:.1e}",
        cohamp::qstate::commutator(&interaction_generator(), &h).max_abs()
    );

    // Entropy rate of the stream, closed form vs direct entropy difference.
    let pert = atom_entropy_rate(&pi, &atom, &p, EntropyMethod::Perturbative)?;
    let exact = atom_entropy_rate(&pi, &atom, &p, EntropyMethod::Exact)?;
    println!("\natom entropy rate: closed form {pert:.6e}, channel route {exact:.6e}");

    // All stationary flows with their mutual identities pre-checked.
    let f = flow_report_at(&pi, &atom, &p)?;
    println!("\nstationary flows:");
    println!("  Qdot1 = {:+.4e}   Qdot2 = {:+.4e}   Edot_a = {:+.4e}", f.qdot1, f.qdot2, f.edot_a);
    println!("  Cdot_a = {:+.4e} <= Cdot_max = {:+.4e}", f.cdot_a, f.cdot_max);
    println!("  Sdot_tot = {:+.4e} (= Cdot_max - Cdot_a)", f.sdot_tot);
    Ok(())
}
