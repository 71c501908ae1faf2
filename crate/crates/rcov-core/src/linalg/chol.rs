//! Cholesky factorization and SPD solves.

use crate::error::{Error, Result};
use crate::linalg::{LowerTriangular, Mat, SpdMatrix, SymMatrix};

/// Relative pivot tolerance: a pivot at or below `1e-12 * max diagonal`
/// marks the input numerically singular.
const PIVOT_REL_TOL: f64 = 1e-12;

/// Cholesky factor of a symmetric matrix, `L * L^T = m` with a strictly
/// positive diagonal. Fails with `NotPositiveDefinite` when a pivot falls
/// below the relative tolerance.
pub fn cholesky(m: &SymMatrix) -> Result<LowerTriangular> {
    cholesky_mat(m.mat())
}

pub(crate) fn cholesky_mat(m: &Mat) -> Result<LowerTriangular> {
    let d = m.rows();
    let max_diag = (0..d).fold(0.0f64, |acc, i| acc.max(m.get(i, i)));
    if max_diag <= 0.0 {
        return Err(Error::NotPositiveDefinite(
            "no positive diagonal entry".into(),
        ));
    }
    let tol = PIVOT_REL_TOL * max_diag;
    let mut l = Mat::zeros(d, d);
    for j in 0..d {
        let mut pivot = m.get(j, j);
        for k in 0..j {
            let v = l.get(j, k);
            pivot -= v * v;
        }
        if pivot <= tol {
            return Err(Error::NotPositiveDefinite(format!(
                "pivot {pivot:.3e} at column {j} (tolerance {tol:.3e})"
            )));
        }
        let diag = pivot.sqrt();
        l.set(j, j, diag);
        for i in j + 1..d {
            let mut v = m.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / diag);
        }
    }
    LowerTriangular::new(l)
}

impl SpdMatrix {
    /// Cholesky factor; cannot fail because positive definiteness was
    /// proven at construction.
    pub fn cholesky(&self) -> LowerTriangular {
        cholesky_mat(self.mat()).expect("validated SPD matrix")
    }
}

/// Solve `m * X = b` for an SPD matrix through its Cholesky factor.
pub fn chol_solve(l: &LowerTriangular, b: &Mat) -> Mat {
    let d = l.dim();
    assert_eq!(b.rows(), d, "chol_solve dimension mismatch");
    let mut x = b.clone();
    // forward: L y = b
    for col in 0..x.cols() {
        for i in 0..d {
            let mut v = x.get(i, col);
            for k in 0..i {
                v -= l.get(i, k) * x.get(k, col);
            }
            x.set(i, col, v / l.get(i, i));
        }
        // backward: L^T x = y
        for i in (0..d).rev() {
            let mut v = x.get(i, col);
            for k in i + 1..d {
                v -= l.get(k, i) * x.get(k, col);
            }
            x.set(i, col, v / l.get(i, i));
        }
    }
    x
}

/// Inverse of an SPD matrix via its Cholesky factor.
pub fn spd_inverse(m: &SpdMatrix) -> Mat {
    chol_solve(&m.cholesky(), &Mat::identity(m.dim()))
}

/// Log determinant of an SPD matrix.
pub fn log_det(m: &SpdMatrix) -> f64 {
    2.0 * m.cholesky().log_diag_sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn identity_factor_is_identity() {
        let l = cholesky(&SymMatrix::identity(3)).unwrap();
        assert_eq!(l.mat(), &Mat::identity(3));
    }

    #[test]
    fn known_factor_2x2() {
        // [[4, 2], [2, 5]] = [[2, 0], [1, 2]] * [[2, 1], [0, 2]]
        let m = SymMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 5.0]]).unwrap();
        let l = cholesky(&m).unwrap();
        assert_abs_diff_eq!(l.get(0, 0), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l.get(1, 0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(l.get(1, 1), 2.0, epsilon = 1e-14);
        // multiply back
        let back = l.gram();
        assert!(back.sub(&m).mat().frob_norm() < 1e-12);
    }

    #[test]
    fn indefinite_is_rejected() {
        // eigenvalues 3 and -1
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(cholesky(&m), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn diagonal_strictly_positive() {
        let m = SymMatrix::from_rows(&[
            vec![2.0, 0.5, 0.1],
            vec![0.5, 1.5, 0.2],
            vec![0.1, 0.2, 1.0],
        ])
        .unwrap();
        let l = cholesky(&m).unwrap();
        for i in 0..3 {
            assert!(l.get(i, i) > 0.0);
        }
    }

    #[test]
    fn solve_and_inverse_agree() {
        let m = SpdMatrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ])
        .unwrap();
        let inv = spd_inverse(&m);
        let prod = m.mat().matmul(&inv);
        assert!(prod.sub(&Mat::identity(3)).frob_norm() < 1e-12);
    }

    #[test]
    fn log_det_matches_diagonal_case() {
        let m = SpdMatrix::from_rows(&[vec![4.0, 0.0], vec![0.0, 9.0]]).unwrap();
        assert_abs_diff_eq!(log_det(&m), 36.0f64.ln(), epsilon = 1e-12);
    }

    fn random_spd(d: usize, seed: u64) -> SymMatrix {
        let mut rng = crate::rng::Rng::from_seed(seed);
        let g = Mat::from_fn(d, d, |_, _| rng.normal());
        let mut m = g.matmul(&g.transpose());
        for i in 0..d {
            m.set(i, i, m.get(i, i) + 1e-3 * d as f64);
        }
        SymMatrix::new(m).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn factor_reconstructs_random_spd(seed in 0u64..1000, d in 1usize..12) {
            let m = random_spd(d, seed);
            let l = cholesky(&m).unwrap();
            let back = l.gram();
            let rel = back.sub(&m).mat().frob_norm() / m.mat().frob_norm();
            prop_assert!(rel < 1e-10, "relative error {rel}");
        }
    }
}
