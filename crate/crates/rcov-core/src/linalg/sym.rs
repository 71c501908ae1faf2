//! Symmetric, SPD and lower-triangular matrix wrappers.
//!
//! `SymMatrix` symmetrizes on construction, absorbing the rounding noise that
//! predicted or accumulated matrices carry. `SpdMatrix` additionally proves
//! positive definiteness by running a Cholesky factorization once.

use crate::error::{Error, Result};
use crate::linalg::chol::cholesky_mat;
use crate::linalg::Mat;

/// Exactly symmetric square matrix (`m[i][j] == m[j][i]` bitwise).
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    mat: Mat,
}

impl SymMatrix {
    /// Symmetrize `(m + m^T) / 2` and wrap. Fails on non-square input.
    pub fn new(m: Mat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let d = m.rows();
        let mut s = m;
        for i in 0..d {
            for j in i + 1..d {
                let v = 0.5 * (s.get(i, j) + s.get(j, i));
                s.set(i, j, v);
                s.set(j, i, v);
            }
        }
        Ok(Self { mat: s })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Mat::from_rows(rows))
    }

    pub fn identity(d: usize) -> Self {
        Self { mat: Mat::identity(d) }
    }

    pub fn zeros(d: usize) -> Self {
        Self { mat: Mat::zeros(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn into_mat(self) -> Mat {
        self.mat
    }

    pub fn add(&self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix { mat: self.mat.add(&rhs.mat) }
    }

    pub fn sub(&self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix { mat: self.mat.sub(&rhs.mat) }
    }

    pub fn scale(&self, a: f64) -> SymMatrix {
        SymMatrix { mat: self.mat.scale(a) }
    }

    /// Congruence `B * self * B^T`, symmetric by construction.
    pub fn congruence(&self, b: &Mat) -> SymMatrix {
        let prod = b.matmul(&self.mat).matmul(&b.transpose());
        SymMatrix::new(prod).expect("congruence of square matrices is square")
    }
}

/// Symmetric positive definite matrix, validated by Cholesky on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    sym: SymMatrix,
}

impl SpdMatrix {
    pub fn new(sym: SymMatrix) -> Result<Self> {
        cholesky_mat(sym.mat())?;
        Ok(Self { sym })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(SymMatrix::from_rows(rows)?)
    }

    pub fn identity(d: usize) -> Self {
        Self { sym: SymMatrix::identity(d) }
    }

    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sym.get(i, j)
    }

    pub fn sym(&self) -> &SymMatrix {
        &self.sym
    }

    pub fn mat(&self) -> &Mat {
        self.sym.mat()
    }

    pub fn scale(&self, a: f64) -> Result<SpdMatrix> {
        if a <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "SPD scaling factor must be positive, got {a}"
            )));
        }
        Ok(Self { sym: self.sym.scale(a) })
    }
}

/// Lower-triangular matrix; strict upper triangle is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular {
    mat: Mat,
}

impl LowerTriangular {
    /// Wrap a square matrix, zeroing its strict upper triangle.
    pub fn new(m: Mat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "lower-triangular matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let d = m.rows();
        let mut t = m;
        for i in 0..d {
            for j in i + 1..d {
                t.set(i, j, 0.0);
            }
        }
        Ok(Self { mat: t })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    /// `L * L^T` as a symmetric matrix.
    pub fn gram(&self) -> SymMatrix {
        let prod = self.mat.matmul(&self.mat.transpose());
        SymMatrix::new(prod).expect("square product")
    }

    /// Sum of log diagonal entries; `2 * log_diag_sum()` is the log
    /// determinant of the factored SPD matrix.
    pub fn log_diag_sum(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i).ln()).sum()
    }
}

/// Half-vectorization: stack the lower triangle (diagonal included) column
/// by column into a vector of length `d(d+1)/2`.
pub fn vech(m: &SymMatrix) -> Vec<f64> {
    let d = m.dim();
    let mut v = Vec::with_capacity(d * (d + 1) / 2);
    for j in 0..d {
        for i in j..d {
            v.push(m.get(i, j));
        }
    }
    v
}

/// Inverse of [`vech`] for a given dimension.
pub fn unvech(v: &[f64], d: usize) -> Result<SymMatrix> {
    let expected = d * (d + 1) / 2;
    if v.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "unvech expected length {expected} for d={d}, got {}",
            v.len()
        )));
    }
    let mut m = Mat::zeros(d, d);
    let mut k = 0;
    for j in 0..d {
        for i in j..d {
            m.set(i, j, v[k]);
            m.set(j, i, v[k]);
            k += 1;
        }
    }
    SymMatrix::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrizes_on_construction() {
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![4.0, 3.0]]);
        let s = SymMatrix::new(m).unwrap();
        assert_eq!(s.get(0, 1), 3.0);
        assert_eq!(s.get(1, 0), 3.0);
    }

    #[test]
    fn spd_rejects_indefinite() {
        let s = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            SpdMatrix::new(s),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn vech_column_major_lower_triangle() {
        // [[a, b], [b, c]] -> (a, b, c)
        let s = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 3.0]]).unwrap();
        assert_eq!(vech(&s), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn vech_length_d3() {
        let s = SymMatrix::identity(3);
        assert_eq!(vech(&s).len(), 6);
    }

    #[test]
    fn vech_unvech_roundtrip() {
        let mut rng = crate::rng::Rng::from_seed(5);
        let m = Mat::from_fn(5, 5, |_, _| rng.normal());
        let s = SymMatrix::new(m).unwrap();
        let back = unvech(&vech(&s), 5).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn unvech_rejects_bad_length() {
        assert!(matches!(
            unvech(&[1.0, 2.0], 2),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn lower_triangular_zeroes_upper() {
        let m = Mat::from_rows(&[vec![1.0, 9.0], vec![2.0, 3.0]]);
        let l = LowerTriangular::new(m).unwrap();
        assert_eq!(l.get(0, 1), 0.0);
        assert_eq!(l.get(1, 0), 2.0);
    }
}
