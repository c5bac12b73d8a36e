//! Dense complex linear algebra and density-matrix primitives.
//!
//! Fixed conventions used everywhere else in the crate:
//!
//! * qubit basis `{|0> = ground, |1> = excited}`; population bias
//!   `delta = p1 - p0`; Bloch `z = delta` (excited state at the north pole);
//! * machine four-level basis `{|00>, |01>, |10>, |11>}` with qubit 1 as the
//!   major index; the virtual-qubit sublevels are `|0>_v = |10>` and
//!   `|1>_v = |01>`;
//! * tensor ordering machine (x) atom;
//! * column-stacking vectorization, `vec(A rho B^dag) = (conj(B) (x) A) vec(rho)`.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here is safe to share across threads.

pub mod density;
pub mod linalg;
pub mod matrix;
pub mod superop;

pub use density::{
    BlochVector, DensityMatrix, Keep, entropy_of_hermitian, expm_hermitian_generator,
    partial_trace, partial_trace_matrix, relative_entropy, tensor, tensor_states, trace_distance,
    trace_norm, von_neumann_entropy,
};
pub use linalg::{DEGENERACY_GAP, Eigh, SvdRight, eigh, matrix_func_hermitian, right_nullspace, svd_right};
pub use matrix::{C64, ComplexMatrix, IM, anticommutator, commutator};
pub use superop::{superop_left, superop_right, superop_sandwich, unvec, vec_index, vectorize};
