//! Single atoms crossing an array of machines: finite coherence gain along
//! the way, incoherent thermal fixed point in the long run.
//!
//! ```sh
//! cargo run --example cascade_trajectories
//! ```

use cohamp::cascade::{fixed_point, kick_magnitude, propagate};
use cohamp::machine::MachineParams;
use cohamp::qstate::{C64, DensityMatrix, trace_distance};

fn main() -> cohamp::Result<()> {
    // Large temperature ratio; each stage kicks the atom by O(phi^2).
    let p = MachineParams::new(1.5, 2.5, 1.2, 0.12, 0.0025, 0.0025, 2.0, 0.02)?;
    let fp = fixed_point(&p)?;
    println!(
        "fixed point: z = {:+.4} (beta_v = {:+.3}, inverted populations)",
        fp.bias(),
        p.virtual_temperature()
    );

    let start = DensityMatrix::qubit(-0.6, C64::new(0.2, 0.0))?;
    let traj = propagate(&start, &p, 1500)?;
    println!("\n stage      x        z       |c|     kick/phi^2   dist(fixed point)");
    for s in (0..=1500).step_by(150) {
        let state = &traj.states[s];
        let kick = if s < 1500 {
            trace_distance(&traj.states[s + 1], state) / (p.phi * p.phi)
        } else {
            kick_magnitude(state, &p)?
        };
        println!(
            "{s:>6}  {:+.4}  {:+.4}   {:.4}     {:8.4}       {:.4}",
            2.0 * state.coherence().re,
            state.bias(),
            state.coherence().norm(),
            kick,
            trace_distance(state, &fp),
        );
    }

    let peak = traj
        .states
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.coherence().norm().total_cmp(&b.1.coherence().norm()))
        .unwrap();
    println!(
        "\ncoherence peaks at stage {}: |c| = {:.4} (started at 0.2)",
        peak.0,
        peak.1.coherence().norm()
    );
    println!("a finite array stops the trajectory at the target; an infinite one lands on the fixed point.");

    // Exchanging the two bath temperatures flips beta_v: the same machine
    // then cools the atom while still amplifying coherent north starts.
    let swapped = MachineParams::new(1.5, 2.5, 0.12, 1.2, 0.0025, 0.0025, 2.0, 0.02)?;
    let north = DensityMatrix::qubit(0.6, C64::new(0.2, 0.0))?;
    let traj = propagate(&north, &swapped, 1000)?;
    let max_c = traj.states.iter().map(|s| s.coherence().norm()).fold(0.0, f64::max);
    println!(
        "\nswapped baths: beta_v = {:+.3}; north atom cools from z = +0.60 to z = {:+.3} while |c| peaks at {:.3}",
        swapped.virtual_temperature(),
        traj.last().bias(),
        max_c
    );
    Ok(())
}
