//! Classical forecasters: moving average, exponential moving average,
//! matrix-factor VAR, and a diagonal CAW model fitted by quasi-Newton
//! maximum likelihood.

mod dcaw;
mod mfa;
mod var;

pub use dcaw::{dcaw_fit, dcaw_forecast, dcaw_loglik, DcawFit};
pub use mfa::{compose_forecast, mfa_fit, MfaFit};
pub use var::{var_fit, var_forecast, var_gaussian_loglik, VarParams};

use crate::error::{Error, Result};
use crate::linalg::{Mat, SpdMatrix, SymMatrix};
use crate::transforms::RCovSeries;

/// Arithmetic mean of the last `n` matrices; SPD as a convex combination of
/// SPD matrices.
pub fn ma_forecast(series: &RCovSeries, n: usize) -> Result<SpdMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("moving-average lag must be >= 1".into()));
    }
    if series.len() < n {
        return Err(Error::SeriesTooShort(format!(
            "moving average over {n} days needs {n} observations, have {}",
            series.len()
        )));
    }
    let d = series.dim();
    let mut acc = Mat::zeros(d, d);
    for t in series.len() - n..series.len() {
        acc = acc.add(series.get(t).mat());
    }
    SpdMatrix::new(SymMatrix::new(acc.scale(1.0 / n as f64))?)
}

/// Exponential moving average with smoothing `alpha = 2 / (n + 1)`,
/// recursively `E_t = alpha * X_t + (1 - alpha) * E_{t-1}` seeded at the
/// first observation.
pub fn ema_forecast(series: &RCovSeries, n: usize) -> Result<SpdMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("EMA lag must be >= 1".into()));
    }
    if series.is_empty() {
        return Err(Error::SeriesTooShort("EMA needs at least one observation".into()));
    }
    let alpha = 2.0 / (n as f64 + 1.0);
    let mut est = series.get(0).mat().clone();
    for t in 1..series.len() {
        est = series.get(t).mat().scale(alpha).add(&est.scale(1.0 - alpha));
    }
    SpdMatrix::new(SymMatrix::new(est)?)
}
