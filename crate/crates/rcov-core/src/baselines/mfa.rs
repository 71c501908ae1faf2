//! Matrix-factor analysis: project a d x d covariance series onto the top
//! eigenvectors of its squared-deviation mean, yielding an r x r factor
//! series plus a static residual part.

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, Mat, SpdMatrix, SymMatrix};
use crate::simulator::MfaEmbedding;
use crate::transforms::RCovSeries;

#[derive(Debug, Clone)]
pub struct MfaFit {
    pub embedding: MfaEmbedding,
    pub factors: Vec<SpdMatrix>,
    /// Set when the series has (numerically) no variation, leaving the
    /// loading directions arbitrary.
    pub degenerate: bool,
}

/// Fit the factor decomposition:
/// - mean `M = (1/L) sum X(t)` and squared deviations
///   `S = (1/L) sum (X(t) - M)^2`,
/// - loading = r top eigenvectors of `S`,
/// - factors `F(t) = A^T X(t) A`,
/// - static part `M - A A^T M A A^T`.
pub fn mfa_fit(series: &RCovSeries, r: usize) -> Result<MfaFit> {
    let d = series.dim();
    let len = series.len();
    if len < 2 {
        return Err(Error::SeriesTooShort(format!(
            "matrix-factor fit needs at least 2 observations, have {len}"
        )));
    }
    if r >= d {
        return Err(Error::DimensionMismatch(format!(
            "factor dimension {r} must be smaller than asset dimension {d}"
        )));
    }

    let mut mean = Mat::zeros(d, d);
    for t in 0..len {
        mean = mean.add(series.get(t).mat());
    }
    mean = mean.scale(1.0 / len as f64);

    let mut sq = Mat::zeros(d, d);
    for t in 0..len {
        let dev = series.get(t).mat().sub(&mean);
        sq = sq.add(&dev.matmul(&dev));
    }
    sq = sq.scale(1.0 / len as f64);

    let eig = sym_eig(&SymMatrix::new(sq)?)?;
    let degenerate = eig.values.first().copied().unwrap_or(0.0)
        <= 1e-12 * mean.frob_norm().max(1.0);
    let loading = Mat::from_fn(d, r, |i, j| eig.vectors.get(i, j));

    let mut factors = Vec::with_capacity(len);
    for t in 0..len {
        let f = series.get(t).sym().congruence(&loading.transpose());
        factors.push(SpdMatrix::new(f).map_err(|e| {
            Error::NotPositiveDefinite(format!("projected factor at day {t} is singular ({e})"))
        })?);
    }

    // static part: mean minus its projection onto the loading subspace
    let proj = loading.matmul(&loading.transpose());
    let projected = proj.matmul(&mean).matmul(&proj);
    let static_part = SymMatrix::new(mean.sub(&projected))?;

    Ok(MfaFit {
        embedding: MfaEmbedding::new(loading, static_part)?,
        factors,
        degenerate,
    })
}

/// Reconstruction direction: `A F A^T + S0` for a factor forecast `F`.
pub fn compose_forecast(emb: &MfaEmbedding, factor_forecast: &SymMatrix) -> Result<SymMatrix> {
    if factor_forecast.dim() != emb.factor_dim() {
        return Err(Error::DimensionMismatch(format!(
            "factor forecast has dim {}, embedding expects {}",
            factor_forecast.dim(),
            emb.factor_dim()
        )));
    }
    Ok(factor_forecast
        .congruence(emb.loading())
        .add(emb.static_part()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::simulator::{
        embed_factors, largest_principal_angle, make_embedding, simulate_caw, EmbeddingSource,
        Innovation,
    };

    fn factor_process(r: usize, len: usize, seed: u64) -> Vec<SpdMatrix> {
        let params = crate::simulator::CawParams::diagonal(
            &vec![1.0; r],
            &[vec![0.35; r]],
            &[vec![0.5; r]],
            Innovation::Wishart { df: r as f64 + 3.0 },
        );
        let mut rng = Rng::from_seed(seed);
        simulate_caw(&params, len, None, 50, &mut rng).unwrap()
    }

    #[test]
    fn recovers_loading_space_in_noiseless_case() {
        let emb = make_embedding(
            8,
            2,
            EmbeddingSource::RandomOrthonormal { seed: 3, static_scale: 0.0 },
        )
        .unwrap();
        let factors = factor_process(2, 400, 17);
        let series = embed_factors(&factors, &emb).unwrap();
        let fit = mfa_fit(&series, 2).unwrap();
        assert!(!fit.degenerate);
        let angle =
            largest_principal_angle(emb.loading(), fit.embedding.loading()).unwrap();
        assert!(angle < 1e-6, "principal angle {angle}");
        // factor series reproduces the originals up to an orthogonal r x r
        // rotation: compare the rotation-invariant traces
        for (orig, rec) in factors.iter().zip(fit.factors.iter()).take(20) {
            let tr_orig: f64 = (0..2).map(|i| orig.get(i, i)).sum();
            let tr_rec: f64 = (0..2).map(|i| rec.get(i, i)).sum();
            assert!((tr_orig - tr_rec).abs() < 1e-8 * tr_orig.abs().max(1.0));
        }
    }

    #[test]
    fn static_part_psd_for_structured_small_series() {
        // factors embedded with a scaled-identity static part: the fitted
        // static part is that scale times the complement projector, PSD up
        // to rounding
        let emb = make_embedding(
            3,
            2,
            EmbeddingSource::RandomOrthonormal { seed: 9, static_scale: 0.01 },
        )
        .unwrap();
        let factors = factor_process(2, 120, 23);
        let series = embed_factors(&factors, &emb).unwrap();
        let fit = mfa_fit(&series, 2).unwrap();
        let eig = sym_eig(fit.embedding.static_part()).unwrap();
        let min = eig.values.last().copied().unwrap();
        assert!(min >= -1e-10, "static part min eigenvalue {min}");
    }

    #[test]
    fn constant_series_is_degenerate_with_orthonormal_loading() {
        let m = SpdMatrix::from_rows(&[
            vec![2.0, 0.3, 0.1],
            vec![0.3, 1.5, 0.2],
            vec![0.1, 0.2, 1.0],
        ])
        .unwrap();
        let series = RCovSeries::from_matrices(vec![m; 10]).unwrap();
        let fit = mfa_fit(&series, 2).unwrap();
        assert!(fit.degenerate);
        let a = fit.embedding.loading();
        let gram = a.transpose().matmul(a);
        assert!(gram.sub(&Mat::identity(2)).frob_norm() < 1e-10);
    }

    #[test]
    fn compose_inverts_projection_modulo_static_part() {
        let emb = make_embedding(
            6,
            2,
            EmbeddingSource::RandomOrthonormal { seed: 5, static_scale: 0.02 },
        )
        .unwrap();
        let f = SymMatrix::from_rows(&[vec![1.2, 0.1], vec![0.1, 0.8]]).unwrap();
        let composed = compose_forecast(&emb, &f).unwrap();
        let back = composed
            .congruence(&emb.loading().transpose())
            .sub(&emb.static_part().congruence(&emb.loading().transpose()));
        assert!(back.sub(&f).mat().frob_norm() < 1e-12);
    }

    #[test]
    fn compose_rejects_wrong_dim() {
        let emb = make_embedding(
            6,
            2,
            EmbeddingSource::RandomOrthonormal { seed: 5, static_scale: 0.0 },
        )
        .unwrap();
        let f = SymMatrix::identity(3);
        assert!(matches!(
            compose_forecast(&emb, &f),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
