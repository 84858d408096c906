//! Reproducible randomness: a counter-based ChaCha stream per (seed, stream)
//! pair, so per-trial draws are independent of scheduling and portable.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::mat::{C64, OperatorMatrix};

/// The stream for a given seed and stream index (trial number, sub-draw, ...).
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Complex Gaussian with independent N(0, sigma^2) parts.
pub fn complex_gaussian(rng: &mut ChaCha8Rng, sigma: f64) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re * sigma, im * sigma)
}

/// Matrix with i.i.d. complex Gaussian entries of the given per-part sigma.
pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, sigma: f64) -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = complex_gaussian(rng, sigma);
        }
    }
    m
}
