//! Wishart and matrix-F sampling.
//!
//! Wishart draws use the Bartlett decomposition: a lower-triangular factor
//! with chi-distributed diagonal and standard normal subdiagonal, which is
//! exact for real (non-integer) degrees of freedom.

use crate::error::{Error, Result};
use crate::linalg::chol::chol_solve;
use crate::linalg::eigen::spd_sqrt;
use crate::linalg::{Mat, SpdMatrix, SymMatrix};
use crate::rng::Rng;

/// Wishart draw with `df` degrees of freedom and the given scale matrix;
/// the mean of the distribution is `df * scale`.
pub fn sample_wishart(df: f64, scale: &SpdMatrix, rng: &mut Rng) -> Result<SpdMatrix> {
    let d = scale.dim();
    if df <= (d - 1) as f64 {
        return Err(Error::InvalidDegreesOfFreedom(format!(
            "Wishart needs df > d - 1 = {}, got {df}",
            d - 1
        )));
    }
    let l = scale.cholesky();
    let mut bartlett = Mat::zeros(d, d);
    for i in 0..d {
        bartlett.set(i, i, rng.chi(df - i as f64));
        for j in 0..i {
            bartlett.set(i, j, rng.normal());
        }
    }
    let lt = l.mat().matmul(&bartlett);
    let w = lt.matmul(&lt.transpose());
    SpdMatrix::new(SymMatrix::new(w)?)
}

/// Matrix-F draw with mean `s`, built from two independent Wishart draws:
/// `((v2 - d - 1) / v1) * s^{1/2} L^{1/2} R^{-1} L^{1/2} s^{1/2}` with
/// `L ~ Wishart(v1, I)` and `R ~ Wishart(v2, I)`.
pub fn sample_matrix_f(v1: f64, v2: f64, s: &SpdMatrix, rng: &mut Rng) -> Result<SpdMatrix> {
    let d = s.dim();
    if v1 <= (d - 1) as f64 {
        return Err(Error::InvalidDegreesOfFreedom(format!(
            "matrix-F needs v1 > d - 1 = {}, got {v1}",
            d - 1
        )));
    }
    if v2 <= (d + 1) as f64 {
        return Err(Error::InvalidDegreesOfFreedom(format!(
            "matrix-F needs v2 > d + 1 = {} for the mean to exist, got {v2}",
            d + 1
        )));
    }
    let eye = SpdMatrix::identity(d);
    let numerator = sample_wishart(v1, &eye, rng)?;
    let denominator = sample_wishart(v2, &eye, rng)?;

    let num_half = spd_sqrt(&numerator)?;
    let den_inv = chol_solve(&denominator.cholesky(), &Mat::identity(d));
    let s_half = spd_sqrt(s)?;

    let core = num_half.mat().matmul(&den_inv).matmul(num_half.mat());
    let out = s_half
        .mat()
        .matmul(&core)
        .matmul(s_half.mat())
        .scale((v2 - (d + 1) as f64) / v1);
    SpdMatrix::new(SymMatrix::new(out)?)
}
