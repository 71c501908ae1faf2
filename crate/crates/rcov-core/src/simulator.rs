//! Synthetic RCOV series from a CAW/BEKK factor process.
//!
//! A latent r x r scale matrix follows the BEKK recursion
//! `S(t) = C C^T + sum_i B_i S(t-i) B_i^T + sum_j A_j X(t-j) A_j^T`
//! where `X` is the realized factor matrix drawn around `S` from either a
//! Wishart or a matrix-F law. Factors are embedded into full dimension as
//! `A X(t) A^T + S0` with an orthonormal loading matrix.

use crate::error::{Error, Result};
use crate::linalg::{sample_matrix_f, sample_wishart, sym_eig, Mat, SpdMatrix, SymMatrix};
use crate::rng::Rng;
use crate::transforms::RCovSeries;

/// Innovation law of the realized factor matrix around its scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Innovation {
    /// `X(t) | S(t) ~ Wishart(df, S(t)/df)`, conditional mean `S(t)`.
    Wishart { df: f64 },
    /// Matrix-F with conditional mean `S(t)`; `df1` and `df2` are the
    /// numerator and denominator Wishart degrees of freedom.
    MatrixF { df1: f64, df2: f64 },
}

/// CAW process parameters: intercept factor `C` (the recursion uses
/// `C * C^T`), coefficients on lagged realized matrices (order q) and on
/// lagged scale matrices (order p), plus the innovation law.
#[derive(Debug, Clone)]
pub struct CawParams {
    pub factor_dim: usize,
    pub intercept: Mat,
    pub realized_coefs: Vec<Mat>,
    pub scale_coefs: Vec<Mat>,
    pub innovation: Innovation,
}

impl CawParams {
    /// Diagonal-restricted parameters from per-factor coefficient vectors.
    pub fn diagonal(
        intercept_diag: &[f64],
        realized_diags: &[Vec<f64>],
        scale_diags: &[Vec<f64>],
        innovation: Innovation,
    ) -> Self {
        let r = intercept_diag.len();
        Self {
            factor_dim: r,
            intercept: Mat::diag(intercept_diag),
            realized_coefs: realized_diags.iter().map(|d| Mat::diag(d)).collect(),
            scale_coefs: scale_diags.iter().map(|d| Mat::diag(d)).collect(),
            innovation,
        }
    }

    /// `(p, q)`: number of scale lags and realized lags.
    pub fn order(&self) -> (usize, usize) {
        (self.scale_coefs.len(), self.realized_coefs.len())
    }

    /// True when every coefficient matrix is diagonal.
    pub fn is_diagonal(&self) -> bool {
        let diag = |m: &Mat| {
            (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m.get(i, j) == 0.0))
        };
        diag(&self.intercept)
            && self.realized_coefs.iter().all(|m| diag(m))
            && self.scale_coefs.iter().all(|m| diag(m))
    }

    /// `C * C^T`, the SPD intercept of the recursion.
    pub fn intercept_gram(&self) -> Result<SpdMatrix> {
        let prod = self.intercept.matmul(&self.intercept.transpose());
        SpdMatrix::new(SymMatrix::new(prod)?)
            .map_err(|_| Error::NotPositiveDefinite("intercept C C^T is singular".into()))
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.factor_dim;
        if r == 0 {
            return Err(Error::InvalidParameter("factor dimension must be >= 1".into()));
        }
        for m in std::iter::once(&self.intercept)
            .chain(self.realized_coefs.iter())
            .chain(self.scale_coefs.iter())
        {
            if m.rows() != r || m.cols() != r {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient matrix is {}x{}, expected {r}x{r}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        match self.innovation {
            Innovation::Wishart { df } => {
                if df <= (r - 1) as f64 {
                    return Err(Error::InvalidDegreesOfFreedom(format!(
                        "Wishart innovation needs df > {}, got {df}",
                        r - 1
                    )));
                }
            }
            Innovation::MatrixF { df1, df2 } => {
                if df1 <= (r - 1) as f64 || df2 <= (r + 1) as f64 {
                    return Err(Error::InvalidDegreesOfFreedom(format!(
                        "matrix-F innovation needs df1 > {} and df2 > {}, got ({df1}, {df2})",
                        r - 1,
                        r + 1
                    )));
                }
            }
        }
        self.intercept_gram()?;
        Ok(())
    }
}

/// One BEKK update. Histories are chronological: `hist[len - i]` is the
/// matrix `i` steps back, so the most recent lag sits at the end.
pub fn bekk_step(
    params: &CawParams,
    scale_hist: &[SpdMatrix],
    realized_hist: &[SpdMatrix],
) -> Result<SpdMatrix> {
    let (p, q) = params.order();
    if scale_hist.len() < p || realized_hist.len() < q {
        return Err(Error::DimensionMismatch(format!(
            "need {p} scale and {q} realized lags, got {} and {}",
            scale_hist.len(),
            realized_hist.len()
        )));
    }
    let r = params.factor_dim;
    for m in scale_hist.iter().chain(realized_hist.iter()) {
        if m.dim() != r {
            return Err(Error::DimensionMismatch(format!(
                "history matrix has dim {}, expected {r}",
                m.dim()
            )));
        }
    }
    let mut s = params.intercept_gram()?.sym().clone();
    for (i, coef) in params.scale_coefs.iter().enumerate() {
        let lag = &scale_hist[scale_hist.len() - 1 - i];
        s = s.add(&lag.sym().congruence(coef));
    }
    for (j, coef) in params.realized_coefs.iter().enumerate() {
        let lag = &realized_hist[realized_hist.len() - 1 - j];
        s = s.add(&lag.sym().congruence(coef));
    }
    SpdMatrix::new(s)
}

/// Fixed point of the deterministic recursion with realized lags replaced by
/// their conditional mean (the scale itself): the long-run mean of the
/// process when it is stationary.
pub fn stationary_scale(params: &CawParams) -> Result<SpdMatrix> {
    params.validate()?;
    let mut s = params.intercept_gram()?;
    for iter in 0..10_000 {
        let hist_s = vec![s.clone(); params.scale_coefs.len()];
        let hist_x = vec![s.clone(); params.realized_coefs.len()];
        let next = bekk_step(params, &hist_s, &hist_x)?;
        let delta = next.mat().sub(s.mat()).frob_norm();
        let scale = next.mat().frob_norm().max(1e-300);
        s = next;
        if delta / scale < 1e-14 {
            return Ok(s);
        }
        if !s.mat().frob_norm().is_finite() {
            return Err(Error::NoConvergence(format!(
                "recursion diverged after {iter} iterations; process is not stationary"
            )));
        }
    }
    Err(Error::NoConvergence(
        "stationary scale iteration hit its cap; process is close to non-stationary".into(),
    ))
}

/// Simulate the factor process. Each step draws the realized matrix from the
/// innovation law around the current scale, then advances the scale by one
/// BEKK update. The first `burn_in` draws are discarded. `init` overrides the
/// initial scale (default: the stationary mean).
pub fn simulate_caw(
    params: &CawParams,
    len: usize,
    init: Option<SpdMatrix>,
    burn_in: usize,
    rng: &mut Rng,
) -> Result<Vec<SpdMatrix>> {
    params.validate()?;
    let (p, q) = params.order();
    let depth = p.max(q).max(1);
    if len == 0 {
        return Err(Error::InvalidParameter("simulation length must be >= 1".into()));
    }
    let s0 = match init {
        Some(m) => {
            if m.dim() != params.factor_dim {
                return Err(Error::DimensionMismatch(format!(
                    "init has dim {}, expected {}",
                    m.dim(),
                    params.factor_dim
                )));
            }
            m
        }
        None => stationary_scale(params)?,
    };

    let draw = |scale: &SpdMatrix, rng: &mut Rng| -> Result<SpdMatrix> {
        match params.innovation {
            Innovation::Wishart { df } => {
                let wishart_scale = scale.scale(1.0 / df)?;
                sample_wishart(df, &wishart_scale, rng)
            }
            Innovation::MatrixF { df1, df2 } => sample_matrix_f(df1, df2, scale, rng),
        }
    };

    // seed the lag histories at the initial scale
    let mut scales: Vec<SpdMatrix> = vec![s0.clone(); depth];
    let mut realized: Vec<SpdMatrix> = Vec::with_capacity(depth);
    for _ in 0..depth {
        realized.push(draw(&s0, rng)?);
    }

    // the seeded draws are the first emissions; burn-in counts from there
    let mut out = Vec::with_capacity(len);
    let mut position = 0usize;
    for r in &realized {
        if position >= burn_in && out.len() < len {
            out.push(r.clone());
        }
        position += 1;
    }
    while out.len() < len {
        let next_scale = bekk_step(params, &scales, &realized)?;
        let x = draw(&next_scale, rng)?;
        if position >= burn_in {
            out.push(x.clone());
        }
        position += 1;
        scales.push(next_scale);
        scales.remove(0);
        realized.push(x);
        realized.remove(0);
    }
    Ok(out)
}

/// Orthonormal loading plus the static part of the embedding
/// `Sigma_x(t) = A Sigma_f(t) A^T + Sigma_0`.
#[derive(Debug, Clone)]
pub struct MfaEmbedding {
    loading: Mat,
    static_part: SymMatrix,
}

impl MfaEmbedding {
    pub fn new(loading: Mat, static_part: SymMatrix) -> Result<Self> {
        let (d, r) = (loading.rows(), loading.cols());
        if r > d {
            return Err(Error::DimensionMismatch(format!(
                "loading matrix is {d}x{r}; factor dimension must not exceed asset dimension"
            )));
        }
        if static_part.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "static part has dim {}, expected {d}",
                static_part.dim()
            )));
        }
        let gram = loading.transpose().matmul(&loading);
        let err = gram.sub(&Mat::identity(r)).frob_norm();
        if err > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "loading columns are not orthonormal (deviation {err:.3e})"
            )));
        }
        Ok(Self { loading, static_part })
    }

    pub fn loading(&self) -> &Mat {
        &self.loading
    }

    pub fn static_part(&self) -> &SymMatrix {
        &self.static_part
    }

    pub fn asset_dim(&self) -> usize {
        self.loading.rows()
    }

    pub fn factor_dim(&self) -> usize {
        self.loading.cols()
    }
}

/// How to construct an embedding.
pub enum EmbeddingSource<'a> {
    /// Seeded random orthonormal loading with `static_scale * I` as the
    /// static part. Stands in for loadings estimated from unavailable data.
    RandomOrthonormal { seed: u64, static_scale: f64 },
    /// Loading from the top eigenvectors of the series' squared-deviation
    /// mean, static part from the residual.
    FromSeries(&'a RCovSeries),
}

/// Build a `d x r` embedding from the given source.
pub fn make_embedding(d: usize, r: usize, source: EmbeddingSource<'_>) -> Result<MfaEmbedding> {
    if r >= d {
        return Err(Error::DimensionMismatch(format!(
            "factor dimension {r} must be smaller than asset dimension {d}"
        )));
    }
    match source {
        EmbeddingSource::RandomOrthonormal { seed, static_scale } => {
            if static_scale < 0.0 {
                return Err(Error::InvalidParameter(
                    "static scale must be non-negative".into(),
                ));
            }
            let mut rng = Rng::from_seed(seed);
            let g = Mat::from_fn(d, r, |_, _| rng.normal());
            let loading = orthonormalize(&g)?;
            let static_part = SymMatrix::new(Mat::identity(d).scale(static_scale))?;
            MfaEmbedding::new(loading, static_part)
        }
        EmbeddingSource::FromSeries(series) => {
            if series.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "series dim {} does not match requested {d}",
                    series.dim()
                )));
            }
            let fit = crate::baselines::mfa_fit(series, r)?;
            Ok(fit.embedding)
        }
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
fn orthonormalize(g: &Mat) -> Result<Mat> {
    let (d, r) = (g.rows(), g.cols());
    let mut cols: Vec<Vec<f64>> = (0..r).map(|j| (0..d).map(|i| g.get(i, j)).collect()).collect();
    for j in 0..r {
        for _pass in 0..2 {
            for k in 0..j {
                let dot: f64 = (0..d).map(|i| cols[j][i] * cols[k][i]).sum();
                for i in 0..d {
                    cols[j][i] -= dot * cols[k][i];
                }
            }
        }
        let norm: f64 = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::SingularDesign(
                "rank-deficient matrix in orthonormalization".into(),
            ));
        }
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    Ok(Mat::from_fn(d, r, |i, j| cols[j][i]))
}

/// Embed a factor series into full dimension: `A X(t) A^T + Sigma_0`.
pub fn embed_factors(factors: &[SpdMatrix], emb: &MfaEmbedding) -> Result<RCovSeries> {
    let r = emb.factor_dim();
    let mut out = Vec::with_capacity(factors.len());
    for (t, f) in factors.iter().enumerate() {
        if f.dim() != r {
            return Err(Error::DimensionMismatch(format!(
                "factor {t} has dim {}, expected {r}",
                f.dim()
            )));
        }
        let embedded = f.sym().congruence(emb.loading()).add(emb.static_part());
        out.push(SpdMatrix::new(embedded).map_err(|e| {
            Error::NotPositiveDefinite(format!(
                "embedded matrix {t} is not positive definite ({e}); use a positive static part"
            ))
        })?);
    }
    RCovSeries::from_matrices(out)
}

/// Largest principal angle between the column spaces of two orthonormal
/// matrices, computed through the projection residual so small angles stay
/// accurate.
pub fn largest_principal_angle(a: &Mat, b: &Mat) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    // M = B - A (A^T B); sin(theta_max) = ||M||_2
    let atb = a.transpose().matmul(b);
    let m = b.sub(&a.matmul(&atb));
    let gram = SymMatrix::new(m.transpose().matmul(&m))?;
    let eig = sym_eig(&gram)?;
    let sin2 = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    Ok(sin2.sqrt().min(1.0).asin())
}
