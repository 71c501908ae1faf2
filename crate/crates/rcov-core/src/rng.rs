//! Seeded random streams.
//!
//! Every sampler in the crate draws from [`Rng`], so a run is a pure function
//! of its seeds. Streams are cheap to derive, which gives independent
//! replications their own generator instead of sharing one across threads.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

/// Deterministic random stream: identical seeds produce identical samples.
#[derive(Debug, Clone)]
pub struct Rng {
    inner: ChaCha8Rng,
}

/// SplitMix64 finalizer, used to decorrelate derived stream seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `id` derived from a base seed.
    pub fn stream(seed: u64, id: u64) -> Self {
        Self::from_seed(mix(seed ^ mix(id)))
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Gamma draw with the given shape and scale.
    pub fn gamma(&mut self, shape: f64, scale: f64) -> f64 {
        debug_assert!(shape > 0.0 && scale > 0.0);
        Gamma::new(shape, scale)
            .expect("gamma parameters validated by caller")
            .sample(&mut self.inner)
    }

    /// Chi draw (square root of a chi-squared draw) with `dof` degrees of freedom.
    pub fn chi(&mut self, dof: f64) -> f64 {
        debug_assert!(dof > 0.0);
        self.gamma(0.5 * dof, 2.0).sqrt()
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle(&mut self, items: &mut [usize]) {
        for i in (1..items.len()).rev() {
            let j = self.inner.random_range(0..=i);
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Rng::from_seed(7);
        let mut b = Rng::from_seed(7);
        for _ in 0..100 {
            assert_eq!(a.normal().to_bits(), b.normal().to_bits());
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
    }

    #[test]
    fn derived_streams_differ() {
        let mut a = Rng::stream(7, 0);
        let mut b = Rng::stream(7, 1);
        let xs: Vec<f64> = (0..8).map(|_| a.uniform()).collect();
        let ys: Vec<f64> = (0..8).map(|_| b.uniform()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn gamma_mean_close() {
        // E[Gamma(k, theta)] = k * theta
        let mut rng = Rng::from_seed(11);
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| rng.gamma(3.0, 2.0)).sum::<f64>() / n as f64;
        assert!((mean - 6.0).abs() < 0.1, "gamma mean {mean}");
    }

    #[test]
    fn shuffle_is_permutation() {
        let mut rng = Rng::from_seed(3);
        let mut idx: Vec<usize> = (0..50).collect();
        rng.shuffle(&mut idx);
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
        assert_ne!(idx, (0..50).collect::<Vec<_>>());
    }
}
