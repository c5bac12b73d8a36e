//! Solve the machine steady state at the reference operating point and
//! inspect the virtual qubit.
//!
//! ```sh
//! cargo run --example steady_state
//! ```

use cohamp::machine::{MachineParams, solve_steady_state, validate_regime};
use cohamp::qstate::{C64, DensityMatrix};

fn main() -> cohamp::Result<()> {
    let p = MachineParams::reference();
    for w in validate_regime(&p) {
        println!("regime warning: {w}");
    }

    // A coherent atom stream from the lower Bloch hemisphere.
    let atom = DensityMatrix::qubit(-0.6, C64::new(0.2, 0.0))?;
    let ss = solve_steady_state(&p, &atom)?;

    println!("virtual inverse temperature beta_v = {:+.4}", p.virtual_temperature());
    println!("steady-state populations:");
    println!("  pi00 = {:.6}", ss.pi00);
    println!("  pi01 = {:.6}   (virtual |1>_v)", ss.pi01);
    println!("  pi10 = {:.6}   (virtual |0>_v)", ss.pi10);
    println!("  pi11 = {:.6}", ss.pi11);
    println!("virtual-qubit coherence pi_v = {:+.6} {:+.6}i", ss.pi_v.re, ss.pi_v.im);
    println!("stationarity residual |L(pi)| = {:.3e}", ss.residual);

    // The virtual qubit is population inverted (beta_v < 0) and coherent:
    // the two ingredients that let the machine amplify atom coherence.
    let inverted = ss.pi01 > ss.pi10;
    println!("virtual qubit inverted: {inverted}, |pi_v| = {:.4}", ss.pi_v.norm());

    // Without the atom stream the machine relaxes to the bare Gibbs product.
    let mut quiet = p;
    quiet.r = 0.0;
    let bare = solve_steady_state(&quiet, &atom)?;
    println!("without atoms: |pi_v| = {:.2e}", bare.pi_v.norm());
    Ok(())
}
