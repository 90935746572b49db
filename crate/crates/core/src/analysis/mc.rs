//! Chunked Monte-Carlo averaging with per-chunk random streams.
//!
//! Chunk `k` draws from a ChaCha8 generator seeded with `seed` and switched
//! to stream `k`, and chunk sums are combined in chunk order. The estimate is
//! therefore a function of `(seed, samples)` alone.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::{self, Execution};

pub(crate) const CHUNK: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Means and standard errors of `K` statistics drawn jointly by `draw`.
pub(crate) fn mc_means<const K: usize, F>(exec: Execution, samples: usize, seed: u64, draw: F) -> [McEstimate; K]
where
    F: Fn(&mut ChaCha8Rng) -> [f64; K] + Sync + Send,
{
    let chunks = samples.div_ceil(CHUNK);
    let partial = exec::map_indexed(exec, chunks, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let len = CHUNK.min(samples - k * CHUNK);
        let mut sum = [0.0; K];
        let mut sq = [0.0; K];
        for _ in 0..len {
            let v = draw(&mut rng);
            for j in 0..K {
                sum[j] += v[j];
                sq[j] += v[j] * v[j];
            }
        }
        (sum, sq)
    });
    let mut sum = [0.0; K];
    let mut sq = [0.0; K];
    for (s, q) in partial {
        for j in 0..K {
            sum[j] += s[j];
            sq[j] += q[j];
        }
    }
    let n = samples as f64;
    std::array::from_fn(|j| {
        let mean = sum[j] / n;
        let var = ((sq[j] - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0);
        McEstimate { estimate: mean, std_error: (var / n).sqrt(), samples, seed }
    })
}

/// A standard normal pair by the Box–Muller transform.
#[inline]
pub(crate) fn normal_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    let (r, phi) = polar_gaussian(rng);
    (r * phi.cos(), r * phi.sin())
}

/// `(r, φ)` with density `r e^{−r²/2} / (2π)` on `[0, ∞) × [0, 2π)`.
#[inline]
pub(crate) fn polar_gaussian<R: Rng>(rng: &mut R) -> (f64, f64) {
    // 1 − U lies in (0, 1], keeping the logarithm finite
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random();
    ((-2.0 * u.ln()).sqrt(), std::f64::consts::TAU * v)
}
