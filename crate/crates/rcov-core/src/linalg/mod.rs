//! Dense symmetric/SPD linear algebra and matrix-variate sampling.
//!
//! Everything operates on 64-bit floats and plain row-major storage. The
//! eigensolver is a cyclic Jacobi iteration, which is simple and robust for
//! the moderate dimensions (d <= 256) this crate targets.

mod chol;
mod eigen;
mod mat;
mod sample;
mod sym;

pub use chol::{chol_solve, cholesky, log_det, spd_inverse};
pub use eigen::{spd_sqrt, sym_eig, EigenPair};
pub use mat::Mat;
pub use sample::{sample_matrix_f, sample_wishart};
pub use sym::{unvech, vech, LowerTriangular, SpdMatrix, SymMatrix};
