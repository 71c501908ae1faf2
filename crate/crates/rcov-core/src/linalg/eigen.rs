//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use crate::error::{Error, Result};
use crate::linalg::{Mat, SpdMatrix, SymMatrix};

/// Eigenvalues sorted descending with the matching orthonormal eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

const MAX_SWEEPS: usize = 100;
const OFF_REL_TOL: f64 = 1e-12;

/// Full eigendecomposition of a symmetric matrix. Converged when the
/// off-diagonal Frobenius norm drops below `1e-12 * ||m||_F`.
pub fn sym_eig(m: &SymMatrix) -> Result<EigenPair> {
    let d = m.dim();
    let mut a = m.mat().clone();
    let mut v = Mat::identity(d);
    let tol = OFF_REL_TOL * a.frob_norm();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..d {
            for j in i + 1..d {
                off += 2.0 * a.get(i, j) * a.get(i, j);
            }
        }
        if off.sqrt() <= tol {
            return Ok(sorted_pairs(&a, v));
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A <- J^T A J on rows/columns p and q
                for k in 0..d {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..d {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                // accumulate eigenvectors
                for k in 0..d {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    Err(Error::NoConvergence(format!(
        "Jacobi did not converge within {MAX_SWEEPS} sweeps for d={d}"
    )))
}

fn sorted_pairs(a: &Mat, v: Mat) -> EigenPair {
    let d = a.rows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        a.get(j, j)
            .partial_cmp(&a.get(i, i))
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = Mat::zeros(d, d);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..d {
            vectors.set(row, new_col, v.get(row, old_col));
        }
    }
    EigenPair { values, vectors }
}

impl EigenPair {
    /// `V * diag(values) * V^T`.
    pub fn reconstruct(&self) -> Mat {
        let d = self.values.len();
        let scaled = Mat::from_fn(d, d, |i, j| self.vectors.get(i, j) * self.values[j]);
        scaled.matmul(&self.vectors.transpose())
    }
}

/// Symmetric square root `O` of an SPD matrix, `O * O = m`, built from the
/// spectral decomposition with square-rooted eigenvalues.
pub fn spd_sqrt(m: &SpdMatrix) -> Result<SpdMatrix> {
    let eig = sym_eig(m.sym())?;
    let d = m.dim();
    // Eigenvalues of a validated SPD matrix are positive up to rounding.
    let roots: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    let scaled = Mat::from_fn(d, d, |i, j| eig.vectors.get(i, j) * roots[j]);
    let o = scaled.matmul(&eig.vectors.transpose());
    SpdMatrix::new(SymMatrix::new(o)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn diagonal_matrix_sorted_values() {
        let m = SymMatrix::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        let eig = sym_eig(&m).unwrap();
        assert_eq!(eig.values, vec![3.0, 2.0, 1.0]);
        // eigenvectors are permuted identity columns
        for (col, &row) in [0usize, 2, 1].iter().enumerate() {
            assert_abs_diff_eq!(eig.vectors.get(row, col).abs(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn known_2x2_eigenvalues() {
        // [[2, 1], [1, 2]]: characteristic polynomial gives 3 and 1
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let eig = sym_eig(&m).unwrap();
        assert_abs_diff_eq!(eig.values[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.values[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_all_ones() {
        let eig = sym_eig(&SymMatrix::identity(7)).unwrap();
        for v in eig.values {
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn orthonormal_vectors_up_to_d64() {
        for d in [2usize, 8, 64] {
            let mut rng = crate::rng::Rng::from_seed(90 + d as u64);
            let g = Mat::from_fn(d, d, |_, _| rng.normal());
            let m = SymMatrix::new(g).unwrap();
            let eig = sym_eig(&m).unwrap();
            let vtv = eig.vectors.transpose().matmul(&eig.vectors);
            let err = vtv.sub(&Mat::identity(d)).frob_norm();
            assert!(err < 1e-10, "d={d}: orthonormality error {err}");
        }
    }

    #[test]
    fn sqrt_of_identity() {
        let s = spd_sqrt(&SpdMatrix::identity(4)).unwrap();
        assert!(s.mat().sub(&Mat::identity(4)).frob_norm() < 1e-12);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let m = SpdMatrix::from_rows(&[vec![4.0, 0.0], vec![0.0, 9.0]]).unwrap();
        let s = spd_sqrt(&m).unwrap();
        assert_abs_diff_eq!(s.get(0, 0), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.get(1, 1), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.get(0, 1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        // [[5, 4], [4, 5]] has square root [[2, 1], [1, 2]]
        let m = SpdMatrix::from_rows(&[vec![5.0, 4.0], vec![4.0, 5.0]]).unwrap();
        let s = spd_sqrt(&m).unwrap();
        assert_abs_diff_eq!(s.get(0, 0), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.get(0, 1), 1.0, epsilon = 1e-9);
        let sq = s.mat().matmul(s.mat());
        assert!(sq.sub(m.mat()).frob_norm() / m.mat().frob_norm() < 1e-9);
    }

    fn random_spd(d: usize, seed: u64) -> SpdMatrix {
        let mut rng = crate::rng::Rng::from_seed(seed);
        let g = Mat::from_fn(d, d, |_, _| rng.normal());
        let mut m = g.matmul(&g.transpose());
        for i in 0..d {
            m.set(i, i, m.get(i, i) + 1e-3 * d as f64);
        }
        SpdMatrix::new(SymMatrix::new(m).unwrap()).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]
        #[test]
        fn reconstruction_and_sqrt_consistency(seed in 0u64..500, d in 1usize..10) {
            let m = random_spd(d, seed);
            let eig = sym_eig(m.sym()).unwrap();
            let rel = eig.reconstruct().sub(m.mat()).frob_norm() / m.mat().frob_norm();
            prop_assert!(rel < 1e-9, "eig reconstruction error {rel}");
            for w in eig.values.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
            let s = spd_sqrt(&m).unwrap();
            let sq_rel = s.mat().matmul(s.mat()).sub(m.mat()).frob_norm() / m.mat().frob_norm();
            prop_assert!(sq_rel < 1e-9, "sqrt reconstruction error {sq_rel}");
        }
    }
}
