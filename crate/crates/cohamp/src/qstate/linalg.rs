//! Deterministic dense Hermitian eigendecomposition (cyclic complex Jacobi)
//! and the derived singular-value machinery used for nullspace extraction.
//!
//! Matrices here never exceed 16x16, so the priority is reproducibility, not
//! speed: fixed sweep order, stable sorting, a fixed phase convention, and
//! Gram-Schmidt in index order inside degenerate clusters. Two runs on the
//! same input produce bit-identical output.

use super::matrix::{C64, ComplexMatrix};
use crate::error::{Error, Result};

/// Off-diagonal reduction target, relative to the Frobenius norm.
const JACOBI_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 60;

/// Eigenvalue gap below which eigenvectors are treated as one degenerate
/// cluster and re-orthonormalized deterministically.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix: `values` ascending, `vectors`
/// holding the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Rejects matrices whose Hermiticity defect exceeds `1e-9 * max(1, |M|)`.
pub fn eigh(m: &ComplexMatrix) -> Result<Eigh> {
    let scale = m.max_abs().max(1.0);
    let defect = m.hermiticity_defect();
    if defect > 1e-9 * scale {
        return Err(Error::NotHermitian(defect));
    }
    Ok(eigh_unchecked(&m.hermitize()))
}

fn eigh_unchecked(m: &ComplexMatrix) -> Eigh {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);

    let norm = a.frobenius_norm();
    if norm == 0.0 || n == 1 {
        let values = (0..n).map(|i| a.get(i, i).re).collect();
        return sort_phase_and_cluster(values, v);
    }
    let target = JACOBI_TOL * norm;
    let skip = target / ((n * n) as f64);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let b = a.get(p, q);
                let beta = b.norm();
                if beta <= skip {
                    continue;
                }
                // Strip the phase of the pivot, then a real Jacobi rotation.
                let phase = b / beta;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                // Smaller root of t^2 - 2 tau t - 1 = 0 (stable form).
                let tau = (aqq - app) / (2.0 * beta);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = s * phase; // s * e^{i theta}
                let spc = sp.conj();

                // A <- U^dag A U with U = [[c, -s e^{i th}], [s e^{-i th}, c]].
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c + akq * spc);
                    a.set(k, q, akq * c - akp * sp);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c + aqk * sp);
                    a.set(q, k, aqk * c - apk * spc);
                }
                // Re-symmetrize the pivot block against rounding drift.
                a.set(p, q, C64::new(0.0, 0.0));
                a.set(q, p, C64::new(0.0, 0.0));
                a.set(p, p, C64::new(a.get(p, p).re, 0.0));
                a.set(q, q, C64::new(a.get(q, q).re, 0.0));

                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c + vkq * spc);
                    v.set(k, q, vkq * c - vkp * sp);
                }
            }
        }
    }

    let values = (0..n).map(|i| a.get(i, i).re).collect();
    sort_phase_and_cluster(values, v)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn sort_phase_and_cluster(values: Vec<f64>, vectors: ComplexMatrix) -> Eigh {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());

    let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut cols: Vec<Vec<C64>> = order
        .iter()
        .map(|&c| (0..n).map(|r| vectors.get(r, c)).collect())
        .collect();

    // Gram-Schmidt in index order inside each near-degenerate cluster.
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && sorted_values[end + 1] - sorted_values[end] < DEGENERACY_GAP {
            end += 1;
        }
        for k in start..=end {
            for j in start..k {
                let overlap: C64 = (0..n).map(|r| cols[j][r].conj() * cols[k][r]).sum();
                for r in 0..n {
                    let x = cols[j][r];
                    cols[k][r] -= overlap * x;
                }
            }
            let nrm: f64 = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 0.0 {
                for z in cols[k].iter_mut() {
                    *z /= nrm;
                }
            }
        }
        start = end + 1;
    }

    // Phase convention: the largest-magnitude component real and positive.
    for col in cols.iter_mut() {
        let mut best = 0;
        let mut best_norm = -1.0;
        for (r, z) in col.iter().enumerate() {
            if z.norm() > best_norm + 1e-15 {
                best_norm = z.norm();
                best = r;
            }
        }
        if best_norm > 0.0 {
            let phase = col[best] / col[best].norm();
            let ph = phase.conj();
            for z in col.iter_mut() {
                *z *= ph;
            }
        }
    }

    let mut out = ComplexMatrix::zeros(n);
    for (c, col) in cols.iter().enumerate() {
        for r in 0..n {
            out.set(r, c, col[r]);
        }
    }
    Eigh { values: sorted_values, vectors: out }
}

/// Right-singular factor of a (generally non-Hermitian) matrix.
///
/// Computed from the Hermitian Gram matrix `M^dag M`: its eigenvectors are
/// the right singular vectors and its eigenvalues the squared singular
/// values. `values` are the singular values in ascending order.
#[derive(Clone, Debug)]
pub struct SvdRight {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

pub fn svd_right(m: &ComplexMatrix) -> SvdRight {
    let gram = &m.adjoint() * m;
    let eig = eigh_unchecked(&gram.hermitize());
    let values = eig.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    SvdRight { values, vectors: eig.vectors }
}

/// Right-nullspace extraction through the augmented Hermitian eigenproblem
/// `[[0, M], [M^dag, 0]]`, whose spectrum is `{+-sigma_i}` with one extra
/// zero per left and per right null direction. Unlike the Gram-matrix
/// route this does not square the condition number, so tiny singular
/// values are resolved to `eps * |M|` even when `|M|` is of order one.
///
/// Returns the count of augmented eigenvalues with `|lambda| < tol` (twice
/// the nullspace dimension for a square matrix) and the unit right-null
/// vector recovered from the zero cluster.
pub fn right_nullspace(m: &ComplexMatrix, tol: f64) -> (usize, Vec<C64>) {
    let n = m.dim();
    let mut aug = ComplexMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, n + j, m.get(i, j));
            aug.set(n + i, j, m.get(j, i).conj());
        }
    }
    let eig = eigh_unchecked(&aug);
    let zero_cluster: Vec<usize> =
        (0..2 * n).filter(|&k| eig.values[k].abs() < tol).collect();
    let below = zero_cluster.len();

    // The lower blocks of the zero-cluster vectors span ker(M); take the
    // combination maximizing the lower-block norm (leading eigenvector of
    // the block Gram matrix) for a deterministic representative.
    let k = zero_cluster.len();
    let mut vector = vec![C64::new(0.0, 0.0); n];
    if k > 0 {
        let mut gram = ComplexMatrix::zeros(k);
        for (a, &ka) in zero_cluster.iter().enumerate() {
            for (b, &kb) in zero_cluster.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..n {
                    acc += eig.vectors.get(n + r, ka).conj() * eig.vectors.get(n + r, kb);
                }
                gram.set(a, b, acc);
            }
        }
        let geig = eigh_unchecked(&gram.hermitize());
        let lead = k - 1; // largest eigenvalue
        for r in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (a, &ka) in zero_cluster.iter().enumerate() {
                acc += geig.vectors.get(a, lead) * eig.vectors.get(n + r, ka);
            }
            vector[r] = acc;
        }
        let norm: f64 = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for z in vector.iter_mut() {
                *z /= norm;
            }
        }
    }
    (below, vector)
}

/// Spectral application of a scalar function to a Hermitian matrix:
/// `f(M) = V f(Lambda) V^dag`.
pub fn matrix_func_hermitian(m: &ComplexMatrix, f: impl Fn(f64) -> C64) -> Result<ComplexMatrix> {
    let eig = eigh(m)?;
    let n = m.dim();
    let mut out = ComplexMatrix::zeros(n);
    for k in 0..n {
        let fk = f(eig.values[k]);
        if fk == C64::new(0.0, 0.0) {
            continue;
        }
        for i in 0..n {
            let vik = eig.vectors.get(i, k);
            for j in 0..n {
                out.add_to(i, j, fk * vik * eig.vectors.get(j, k).conj());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, c(rng.gen_range(-1.0..1.0), 0.0));
            for j in i + 1..n {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        m
    }

    #[test]
    fn eigh_pauli_x() {
        let sx = ComplexMatrix::from_vec(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let e = eigh(&sx).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_identity_is_canonical() {
        let e = eigh(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(e.vectors, ComplexMatrix::identity(4));
    }

    #[test]
    fn eigh_random_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in [2usize, 4, 8, 16] {
            for _ in 0..20 {
                let m = random_hermitian(n, &mut rng);
                let e = eigh(&m).unwrap();
                // V^dag V = I
                let gram = &e.vectors.adjoint() * &e.vectors;
                assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-13);
                // V Lambda V^dag = M
                let recon = matrix_func_hermitian(&m, |x| c(x, 0.0)).unwrap();
                assert!(recon.max_abs_diff(&m) < 1e-12);
                // sorted
                for w in e.values.windows(2) {
                    assert!(w[0] <= w[1]);
                }
            }
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_vec(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigh_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(8, &mut rng);
        let a = eigh(&m).unwrap();
        let b = eigh(&m).unwrap();
        assert_eq!(a.vectors, b.vectors);
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn svd_right_known_nullspace() {
        // M = [[1, 1], [2, 2]] has right null vector (1, -1)/sqrt(2).
        let m = ComplexMatrix::from_vec(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]);
        let s = svd_right(&m);
        assert!(s.values[0] < 1e-12);
        assert!((s.values[1] - (10.0f64).sqrt()).abs() < 1e-12);
        let null = (s.vectors.get(0, 0), s.vectors.get(1, 0));
        let resid = (null.0 + null.1).norm();
        assert!(resid < 1e-12, "null vector components should be opposite: {resid}");
    }

    #[test]
    fn svd_right_residuals_match_singular_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let mut m = ComplexMatrix::zeros(4);
            for i in 0..4 {
                for j in 0..4 {
                    m.set(i, j, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                }
            }
            let s = svd_right(&m);
            for k in 0..4 {
                let mut col = ComplexMatrix::zeros(4);
                for r in 0..4 {
                    col.set(r, 0, s.vectors.get(r, k));
                }
                let mv = &m * &col;
                let norm: f64 = (0..4).map(|r| mv.get(r, 0).norm_sqr()).sum::<f64>().sqrt();
                assert!((norm - s.values[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn matrix_exponential_via_spectral_function() {
        // exp(-i (pi/2) sigma_x) = -i sigma_x
        let sx = ComplexMatrix::from_vec(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let u = matrix_func_hermitian(&sx, |x| (-C64::new(0.0, 1.0) * x * std::f64::consts::FRAC_PI_2).exp()).unwrap();
        let expect = sx.scale(c(0.0, -1.0));
        assert!(u.max_abs_diff(&expect) < 1e-12);
    }
}
