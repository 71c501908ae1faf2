//! Forecasting of daily realized covariance (RCOV) matrices.
//!
//! The crate bundles everything needed to run covariance forecasting
//! experiments end to end:
//!
//! - [`linalg`]: dense symmetric/SPD linear algebra (Cholesky, Jacobi
//!   eigendecomposition, matrix square roots) and Wishart / matrix-F
//!   sampling on top of a seeded [`rng::Rng`] stream.
//! - [`transforms`]: SPD-preserving preprocessing (Cholesky factor, spectral
//!   square root, or both), lag-window dataset construction and
//!   chronological train/validation/test splitting.
//! - [`simulator`]: synthetic RCOV series from a CAW/BEKK factor process
//!   embedded into full dimension through an orthonormal loading matrix.
//! - [`baselines`]: moving average, exponential moving average, matrix-factor
//!   VAR and a diagonal CAW model fitted by quasi-Newton maximum likelihood.
//! - [`neuralnet`]: a self-contained ConvLSTM + CNN regression engine with
//!   reverse-mode gradients, Huber losses and Adam with L1 regularization.
//! - [`evaluation`]: rolling one-step evaluation, RMSE/MAE metrics,
//!   correlation tracking and feature-map diagnostics.

pub mod baselines;
pub mod error;
pub mod evaluation;
pub mod linalg;
pub mod neuralnet;
pub mod opt;
pub mod rng;
pub mod simulator;
pub mod transforms;

pub use error::{Error, Result};
pub use linalg::{EigenPair, LowerTriangular, Mat, SpdMatrix, SymMatrix};
pub use rng::Rng;
pub use transforms::{RCovSeries, SplitScheme, TransformSpec};
