//! Column-stacking vectorization and superoperator builders.
//!
//! Convention: `vec(M)[j*n + i] = M[i][j]` (columns stacked top to bottom),
//! so `vec(A rho B) = (B^T (x) A) vec(rho)` and for the common sandwich
//! `A rho B^dag` the superoperator is `conj(B) (x) A`.

use super::matrix::{C64, ComplexMatrix};

/// Index of entry `(i, j)` of an `n x n` matrix in its column-stacked vector.
#[inline]
pub fn vec_index(n: usize, i: usize, j: usize) -> usize {
    j * n + i
}

/// Column-stacked vector of `m`, returned as an `n^2 x 1`-like flat Vec.
pub fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    let n = m.dim();
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for i in 0..n {
            v[vec_index(n, i, j)] = m.get(i, j);
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn unvec(v: &[C64], n: usize) -> ComplexMatrix {
    assert_eq!(v.len(), n * n);
    let mut m = ComplexMatrix::zeros(n);
    for j in 0..n {
        for i in 0..n {
            m.set(i, j, v[vec_index(n, i, j)]);
        }
    }
    m
}

/// Superoperator of left multiplication, `rho -> A rho`: `I (x) A`.
pub fn superop_left(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::identity(a.dim()).kron(a)
}

/// Superoperator of right multiplication, `rho -> rho B`: `B^T (x) I`.
pub fn superop_right(b: &ComplexMatrix) -> ComplexMatrix {
    b.transpose().kron(&ComplexMatrix::identity(b.dim()))
}

/// Superoperator of the sandwich `rho -> A rho B^dag`: `conj(B) (x) A`.
pub fn superop_sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    b.conj().kron(a)
}
