use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::DesError;

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Streams with the same seed but different ids are independent ChaCha
/// streams, so each simulation purpose (arrivals, service, ...) can draw
/// without perturbing the others.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform draw on `[low, high)`.
    pub fn uniform_range(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.uniform()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Normal(mean, sd) draw, resampled until strictly positive.
    pub fn sample_normal_positive(&mut self, mean: f64, sd: f64) -> Result<f64, DesError> {
        if !(sd >= 0.0) || !mean.is_finite() || !sd.is_finite() {
            return Err(DesError::InvalidParameter(format!(
                "normal(mean={mean}, sd={sd})"
            )));
        }
        if sd == 0.0 {
            return if mean > 0.0 {
                Ok(mean)
            } else {
                Err(DesError::InvalidParameter(format!(
                    "degenerate normal at non-positive mean {mean}"
                )))
            };
        }
        // Acceptance probability is P(Z > -mean/sd); bail out when it is
        // vanishingly small rather than looping forever.
        if mean / sd < -8.0 {
            return Err(DesError::InvalidParameter(format!(
                "normal(mean={mean}, sd={sd}) has negligible positive mass"
            )));
        }
        loop {
            let z: f64 = self.rng.sample(StandardNormal);
            let x = mean + sd * z;
            if x > 0.0 {
                return Ok(x);
            }
        }
    }

    /// Exponential draw with the given rate (events per second).
    pub fn sample_exponential(&mut self, rate: f64) -> Result<f64, DesError> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(DesError::InvalidParameter(format!("exponential rate {rate}")));
        }
        Ok(exponential_quantile(self.uniform(), rate))
    }
}

/// Inverse CDF of the exponential distribution, `u` in `[0, 1)`.
pub fn exponential_quantile(u: f64, rate: f64) -> f64 {
    -(1.0 - u).ln() / rate
}

/// Derive a child seed from a master seed and an index (splitmix64 finalizer).
///
/// Used to give every replication its own independent seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
