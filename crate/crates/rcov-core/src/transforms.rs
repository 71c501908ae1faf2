//! SPD-preserving preprocessing and lag-window dataset construction.
//!
//! The forecasting network regresses on transformed matrices; the transform
//! guarantees that inverse-mapped predictions are positive semidefinite
//! regardless of what the network emits. Four chains are supported: identity,
//! Cholesky factor, spectral square root, and square root followed by
//! Cholesky.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, spd_sqrt, LowerTriangular, Mat, SpdMatrix, SymMatrix};

/// Preprocessing chain applied to every matrix before it reaches the model,
/// with an exact inverse on the way back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformSpec {
    None,
    Cholesky,
    Sqrt,
    SqrtThenCholesky,
}

impl TransformSpec {
    pub const ALL: [TransformSpec; 4] = [
        TransformSpec::None,
        TransformSpec::Cholesky,
        TransformSpec::Sqrt,
        TransformSpec::SqrtThenCholesky,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TransformSpec::None => "none",
            TransformSpec::Cholesky => "cholesky",
            TransformSpec::Sqrt => "sqrt",
            TransformSpec::SqrtThenCholesky => "sqrt-cholesky",
        }
    }
}

/// Forward transform of an SPD matrix into model space.
pub fn forward_transform(sigma: &SpdMatrix, spec: TransformSpec) -> Result<Mat> {
    match spec {
        TransformSpec::None => Ok(sigma.mat().clone()),
        TransformSpec::Cholesky => Ok(sigma.cholesky().mat().clone()),
        TransformSpec::Sqrt => Ok(spd_sqrt(sigma)?.mat().clone()),
        TransformSpec::SqrtThenCholesky => {
            let root = spd_sqrt(sigma)?;
            Ok(cholesky(root.sym())?.mat().clone())
        }
    }
}

/// Inverse transform of a raw model output back to covariance space.
///
/// Total on any real square matrix: triangular kinds drop the strict upper
/// triangle, the square-root kind symmetrizes before squaring. The result is
/// positive semidefinite by construction for every kind except `None`, which
/// only symmetrizes.
pub fn inverse_transform(raw: &Mat, spec: TransformSpec) -> SymMatrix {
    assert!(raw.is_square(), "inverse_transform expects a square matrix");
    match spec {
        TransformSpec::None => SymMatrix::new(raw.clone()).expect("square"),
        TransformSpec::Cholesky => {
            let l = LowerTriangular::new(raw.clone()).expect("square");
            l.gram()
        }
        TransformSpec::Sqrt => {
            let o = SymMatrix::new(raw.clone()).expect("square");
            SymMatrix::new(o.mat().matmul(o.mat())).expect("square")
        }
        TransformSpec::SqrtThenCholesky => {
            let l = LowerTriangular::new(raw.clone()).expect("square");
            let o = l.gram();
            SymMatrix::new(o.mat().matmul(o.mat())).expect("square")
        }
    }
}

/// Time-indexed sequence of SPD matrices with asset tickers and strictly
/// increasing day labels; the universal dataset currency of the crate.
#[derive(Debug, Clone)]
pub struct RCovSeries {
    assets: Vec<String>,
    labels: Vec<i64>,
    matrices: Vec<SpdMatrix>,
}

impl RCovSeries {
    pub fn new(assets: Vec<String>, labels: Vec<i64>, matrices: Vec<SpdMatrix>) -> Result<Self> {
        let d = assets.len();
        if labels.len() != matrices.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} matrices",
                labels.len(),
                matrices.len()
            )));
        }
        for (t, m) in matrices.iter().enumerate() {
            if m.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {t} has dim {}, expected {d}",
                    m.dim()
                )));
            }
        }
        for w in labels.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidParameter(format!(
                    "day labels must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { assets, labels, matrices })
    }

    /// Series with synthetic tickers `S00..` and labels `0..T`.
    pub fn from_matrices(matrices: Vec<SpdMatrix>) -> Result<Self> {
        let d = matrices.first().map_or(0, |m| m.dim());
        let assets = (0..d).map(|i| format!("S{i:02}")).collect();
        let labels = (0..matrices.len() as i64).collect();
        Self::new(assets, labels, matrices)
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.assets.len()
    }

    pub fn get(&self, t: usize) -> &SpdMatrix {
        &self.matrices[t]
    }

    pub fn matrices(&self) -> &[SpdMatrix] {
        &self.matrices
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    /// Contiguous chronological sub-series over `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> RCovSeries {
        RCovSeries {
            assets: self.assets.clone(),
            labels: self.labels[range.clone()].to_vec(),
            matrices: self.matrices[range].to_vec(),
        }
    }
}

/// One supervised sample: `input[k]` is the transformed matrix `k` days
/// before the forecast day (`input[0]` most recent), `target` the transformed
/// forecast-day matrix.
#[derive(Debug, Clone)]
pub struct LagWindowSample {
    pub input: Vec<Arc<Mat>>,
    pub target: Arc<Mat>,
}

/// Lag windows over the whole series: one sample per forecast day in
/// `lag..T`.
pub fn make_windows(
    series: &RCovSeries,
    spec: TransformSpec,
    lag: usize,
) -> Result<Vec<LagWindowSample>> {
    make_windows_range(series, spec, lag, lag..series.len())
}

/// Lag windows whose forecast (target) days lie in `targets`. Inputs reach
/// back before the range start, so splits share no target day but may share
/// input context; a target day is never part of its own input window.
pub fn make_windows_range(
    series: &RCovSeries,
    spec: TransformSpec,
    lag: usize,
    targets: std::ops::Range<usize>,
) -> Result<Vec<LagWindowSample>> {
    if lag == 0 {
        return Err(Error::InvalidParameter("lag must be at least 1".into()));
    }
    if targets.start < lag || targets.end > series.len() || targets.is_empty() {
        return Err(Error::SeriesTooShort(format!(
            "target range {targets:?} needs {lag} days of context in a series of length {}",
            series.len()
        )));
    }
    // transform each needed day exactly once
    let first_needed = targets.start - lag;
    let mut transformed: Vec<Arc<Mat>> = Vec::with_capacity(targets.end - first_needed);
    for t in first_needed..targets.end {
        transformed.push(Arc::new(forward_transform(series.get(t), spec)?));
    }
    let at = |t: usize| transformed[t - first_needed].clone();

    let mut samples = Vec::with_capacity(targets.len());
    for target_day in targets {
        let input: Vec<Arc<Mat>> = (1..=lag).map(|k| at(target_day - k)).collect();
        samples.push(LagWindowSample {
            input,
            target: at(target_day),
        });
    }
    Ok(samples)
}

/// Chronological split scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitScheme {
    /// Fractions of the series for train/validation/test; must sum to one.
    Fractional { train: f64, val: f64, test: f64 },
    /// Last `test` days for testing, the `val` days before them for
    /// validation, everything earlier for training.
    TrailingDays { val: usize, test: usize },
}

impl SplitScheme {
    pub fn fractional_70_10_20() -> Self {
        SplitScheme::Fractional { train: 0.7, val: 0.1, test: 0.2 }
    }
}

/// End indices `(train_end, val_end)` of the train and validation spans.
pub fn split_bounds(len: usize, scheme: &SplitScheme) -> Result<(usize, usize)> {
    let (train_end, val_end) = match *scheme {
        SplitScheme::Fractional { train, val, test } => {
            if !(train > 0.0 && val > 0.0 && test > 0.0) {
                return Err(Error::InvalidParameter(
                    "split fractions must be positive".into(),
                ));
            }
            if (train + val + test - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "split fractions must sum to 1, got {}",
                    train + val + test
                )));
            }
            let train_end = (len as f64 * train).floor() as usize;
            let val_end = train_end + (len as f64 * val).floor() as usize;
            (train_end, val_end)
        }
        SplitScheme::TrailingDays { val, test } => {
            if len < val + test + 1 {
                return Err(Error::SeriesTooShort(format!(
                    "{len} days cannot hold trailing splits of {val} + {test} plus training data"
                )));
            }
            (len - val - test, len - test)
        }
    };
    if train_end == 0 || val_end == train_end || val_end == len {
        return Err(Error::SeriesTooShort(format!(
            "split of {len} days leaves an empty part (bounds {train_end}, {val_end})"
        )));
    }
    Ok((train_end, val_end))
}

/// Contiguous, chronologically ordered, disjoint train/validation/test
/// series covering the input.
pub fn split_series(
    series: &RCovSeries,
    scheme: &SplitScheme,
) -> Result<(RCovSeries, RCovSeries, RCovSeries)> {
    let (train_end, val_end) = split_bounds(series.len(), scheme)?;
    Ok((
        series.slice(0..train_end),
        series.slice(train_end..val_end),
        series.slice(val_end..series.len()),
    ))
}
