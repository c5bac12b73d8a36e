//! Simulation of a two-qubit autonomous thermal machine that manipulates and
//! amplifies the energetic coherence of a stream of two-level atoms.
//!
//! The machine is two non-interacting qubits, each coupled to its own thermal
//! bath, exchanging excitations with resonant flying atoms through its
//! virtual qubit. The crate covers:
//!
//! * [`qstate`] — dense complex linear algebra and density-matrix primitives;
//! * [`coherence`] — relative entropy of coherence and asymmetry, dephasing
//!   maps, and bipartite additivity identities;
//! * [`machine`] — Liouvillian assembly and stationary states;
//! * [`atomchannel`] — the machine-to-atom CPTP map, exact and perturbative;
//! * [`thermo`] — stationary heat, energy, entropy and coherence flows with
//!   their second-law bound;
//! * [`cascade`] — arrays of machines acting in sequence on single atoms;
//! * [`benchlab`] — closed-form two-qubit amplification identities and their
//!   matrix-evolution cross-checks;
//! * [`cli`] — the `cohamp` command-line tool emitting CSV data.
//!
//! Conventions: `hbar = k_B = 1`; all states are interaction-picture states;
//! qubit bias `delta = p1 - p0` with the excited state at Bloch `z = +1`.

pub mod atomchannel;
pub mod benchlab;
pub mod cascade;
pub mod cli;
pub mod coherence;
pub mod error;
pub mod machine;
pub mod qstate;
pub mod thermo;

pub use error::{Error, Result};
