//! ASCII map of the coherence-amplification region over the atom Bloch
//! disk (y = 0 cross-section, rotating frame).
//!
//! `+` marks input states whose coherence grows, `-` states where it
//! decays, `.` the (incoherent) axis and the masked rim.
//!
//! ```sh
//! cargo run --example bloch_map
//! ```

use cohamp::machine::MachineParams;
use cohamp::qstate::{C64, DensityMatrix};
use cohamp::thermo::flow_report;

fn main() -> cohamp::Result<()> {
    let p = MachineParams::reference();
    let n = 31;
    println!("Cdot_a sign over the (x, z) Bloch disk at beta2 = 0.2 beta1  (z up, x right)");
    for iz in (0..n).rev() {
        let z = -1.0 + 2.0 * iz as f64 / (n - 1) as f64;
        let mut line = String::new();
        for ix in 0..n {
            let x = -1.0 + 2.0 * ix as f64 / (n - 1) as f64;
            if x * x + z * z > 0.95 {
                line.push(' ');
                continue;
            }
            let atom = DensityMatrix::qubit(z, C64::new(x / 2.0, 0.0))?;
            let c = flow_report(&p, &atom)?.cdot_a;
            line.push(if c > 1e-12 {
                '+'
            } else if c < -1e-12 {
                '-'
            } else {
                '.'
            });
        }
        println!("  {line}");
    }
    println!();
    println!("the '+' region sits below the equator: the machine virtual qubit is");
    println!("population inverted there, opposite in bias to the mostly-ground atoms.");
    Ok(())
}
