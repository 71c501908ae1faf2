//! Vector autoregression on half-vectorized factor matrices, fitted by
//! ordinary least squares.

use crate::error::{Error, Result};
use crate::linalg::{unvech, vech, Mat, SpdMatrix, SymMatrix};

#[derive(Debug, Clone)]
pub struct VarParams {
    pub order: usize,
    /// Intercept, length `k = r (r + 1) / 2`.
    pub intercept: Vec<f64>,
    /// One `k x k` coefficient matrix per lag.
    pub coefs: Vec<Mat>,
}

impl VarParams {
    pub fn vech_dim(&self) -> usize {
        self.intercept.len()
    }

    pub fn param_count(&self) -> usize {
        let k = self.vech_dim();
        k + self.order * k * k
    }
}

/// Least-squares fit of `vech(F(t))` on an intercept and `order` lags.
pub fn var_fit(factors: &[SpdMatrix], order: usize) -> Result<VarParams> {
    if order == 0 {
        return Err(Error::InvalidParameter("VAR order must be >= 1".into()));
    }
    let len = factors.len();
    if len <= order {
        return Err(Error::SeriesTooShort(format!(
            "VAR({order}) needs more than {order} observations, have {len}"
        )));
    }
    let r = factors[0].dim();
    let k = r * (r + 1) / 2;
    let rows = len - order;
    let cols = 1 + k * order;
    if rows < cols {
        return Err(Error::SeriesTooShort(format!(
            "VAR({order}) with k={k} needs at least {cols} usable rows, have {rows}"
        )));
    }

    let vechs: Vec<Vec<f64>> = factors.iter().map(|f| vech(f.sym())).collect();
    let mut x = Mat::zeros(rows, cols);
    let mut y = Mat::zeros(rows, k);
    for t in order..len {
        let row = t - order;
        x.set(row, 0, 1.0);
        for lag in 1..=order {
            for i in 0..k {
                x.set(row, 1 + (lag - 1) * k + i, vechs[t - lag][i]);
            }
        }
        for i in 0..k {
            y.set(row, i, vechs[t][i]);
        }
    }

    // normal equations
    let xt = x.transpose();
    let xtx = xt.matmul(&x);
    let xty = xt.matmul(&y);
    let beta = xtx.solve(&xty)?; // cols x k

    let intercept: Vec<f64> = (0..k).map(|i| beta.get(0, i)).collect();
    let coefs: Vec<Mat> = (0..order)
        .map(|lag| Mat::from_fn(k, k, |i, l| beta.get(1 + lag * k + l, i)))
        .collect();
    Ok(VarParams { order, intercept, coefs })
}

/// One-step mean forecast from a chronological factor history, un-vectorized
/// back to a symmetric matrix. Positive definiteness is not guaranteed.
pub fn var_forecast(params: &VarParams, history: &[SpdMatrix]) -> Result<SymMatrix> {
    if history.len() < params.order {
        return Err(Error::SeriesTooShort(format!(
            "VAR({}) forecast needs {} lags, have {}",
            params.order,
            params.order,
            history.len()
        )));
    }
    let k = params.vech_dim();
    let r = history[history.len() - 1].dim();
    if r * (r + 1) / 2 != k {
        return Err(Error::DimensionMismatch(format!(
            "history matrices have dim {r}, parameters expect vech length {k}"
        )));
    }
    let mut pred = params.intercept.clone();
    for (lag, coef) in params.coefs.iter().enumerate() {
        let past = vech(history[history.len() - 1 - lag].sym());
        for i in 0..k {
            let mut acc = 0.0;
            for l in 0..k {
                acc += coef.get(i, l) * past[l];
            }
            pred[i] += acc;
        }
    }
    unvech(&pred, r)
}

/// Gaussian log-likelihood of the fitted VAR at the maximum-likelihood
/// residual covariance, for information-criterion comparisons.
pub fn var_gaussian_loglik(params: &VarParams, factors: &[SpdMatrix]) -> Result<f64> {
    let order = params.order;
    if factors.len() <= order {
        return Err(Error::SeriesTooShort("not enough observations".into()));
    }
    let k = params.vech_dim();
    let t_eff = factors.len() - order;
    let mut resid = Mat::zeros(t_eff, k);
    for t in order..factors.len() {
        let pred = vech(&var_forecast(params, &factors[..t])?);
        let actual = vech(factors[t].sym());
        for i in 0..k {
            resid.set(t - order, i, actual[i] - pred[i]);
        }
    }
    let mut cov = resid.transpose().matmul(&resid).scale(1.0 / t_eff as f64);
    // ridge for numerically exact fits so the log-determinant stays finite
    let ridge = 1e-12 * cov.max_abs().max(1e-12);
    for i in 0..k {
        cov.set(i, i, cov.get(i, i) + ridge);
    }
    let spd = SpdMatrix::new(SymMatrix::new(cov)?)
        .map_err(|e| Error::NonFiniteLikelihood(format!("residual covariance: {e}")))?;
    let logdet = crate::linalg::log_det(&spd);
    let n = t_eff as f64;
    let kk = k as f64;
    Ok(-0.5 * n * (kk * (2.0 * std::f64::consts::PI).ln() + logdet + kk))
}
