//! Seeded randomness contract shared by every stochastic operation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal};

use crate::num::Real;

/// Deterministic random stream: an identical seed and an identical call
/// sequence produce an identical draw sequence on every platform.
///
/// A stream is single-owner; concurrent work must derive one stream per
/// worker from distinct seeds instead of sharing.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform<S: Real>(&mut self) -> S {
        S::of(self.rng.gen::<f64>())
    }

    /// Uniform integer in `[0, n)`; `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0, "index() needs a nonempty range");
        self.rng.gen_range(0..n)
    }

    /// Standard normal draw.
    pub fn standard_normal<S: Real>(&mut self) -> S {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        S::of(z)
    }

    /// Standard Cauchy draw.
    pub fn standard_cauchy<S: Real>(&mut self) -> S {
        let c: f64 = Cauchy::new(0.0, 1.0)
            .expect("unit scale")
            .sample(&mut self.rng);
        S::of(c)
    }
}
