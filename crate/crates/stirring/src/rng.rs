//! Deterministic stream derivation for reproducible experiments.
//!
//! Every random quantity in the library is drawn from a stream derived from
//! `(master seed, domain tag, replication index)`, so reruns with the same
//! seed are bit-identical regardless of thread count, and runs for different
//! population sizes on the same master seed share their clock and uniform
//! streams (the coupling construction requires exactly that sharing).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Domain tags keeping derived streams disjoint.
pub mod domain {
    /// Jump times of the inhomogeneous Poisson clock.
    pub const CLOCK: u64 = 1;
    /// Split/merge uniforms, indexed by jump count.
    pub const EVENT_UNIFORMS: u64 = 2;
    /// Correction uniforms of the coupling, indexed by `(n, step)`.
    pub const CORRECTION: u64 = 3;
    /// Drivers of the discrete stirring chains.
    pub const STIRRING: u64 = 4;
    /// Stick-breaking and transformation uniforms of the stationarity harness.
    pub const PARTITION: u64 = 5;
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer; used both as a mixer and as a tiny generator for key expansion.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fold(parts: &[u64]) -> u64 {
    let mut state = GOLDEN;
    for &p in parts {
        state = mix(state.wrapping_add(GOLDEN).wrapping_add(p));
    }
    state
}

/// An independent ChaCha stream for `(master, domain, index)`.
pub fn stream(master: u64, domain: u64, index: u64) -> ChaCha12Rng {
    let mut state = fold(&[master, domain, index]);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(GOLDEN);
        chunk.copy_from_slice(&mix(state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

/// A single uniform in `[0, 1)` addressed by path, without materializing a stream.
///
/// Used for the lazily drawn correction uniforms, which are indexed by
/// `(replication, n, step)` so that runs for different `n` on one master seed
/// stay comparable.
pub fn unit_at(master: u64, domain: u64, path: &[u64]) -> f64 {
    let mut parts = Vec::with_capacity(path.len() + 2);
    parts.push(master);
    parts.push(domain);
    parts.extend_from_slice(path);
    u64_to_unit(fold(&parts))
}

/// Map 53 high bits to a double in `[0, 1)`.
pub fn u64_to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Uniform in `[0, 1)` from a stream.
pub fn unit<R: Rng>(rng: &mut R) -> f64 {
    u64_to_unit(rng.gen::<u64>())
}

/// Standard exponential via inversion; strictly positive.
pub fn standard_exponential<R: Rng>(rng: &mut R) -> f64 {
    -(1.0 - unit(rng)).ln()
}
