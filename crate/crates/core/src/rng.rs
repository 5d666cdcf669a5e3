//! Seeded random number generation.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood; the same mixing
//! constants as `java.util.SplittableRandom`): a 64-bit counter advanced by
//! the golden-gamma increment `0x9E3779B97F4A7C15`, finalized with two
//! xor-shift multiplies. It is splittable, trivially portable, and fully
//! specified here so that reimplementations in other languages can match
//! its output distribution (comparisons across implementations are
//! statistical, not bitwise).
//!
//! Gaussian variates use the Box-Muller transform on pairs of uniforms;
//! the second variate of each pair is cached.

use crate::math;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent child seed for a replication stream.
///
/// `child_seed(seed, i) = mix64(seed + (i + 1) · γ)` where γ is the
/// golden-gamma increment; distinct indices give decorrelated streams.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    cached_gaussian: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            cached_gaussian: None,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate (Box-Muller, cached pair member).
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.cached_gaussian.take() {
            return z;
        }
        // u1 must be strictly positive for the log.
        let mut u1 = self.next_f64();
        while u1 <= 0.0 {
            u1 = self.next_f64();
        }
        let u2 = self.next_f64();
        let r = math::sqrt(-2.0 * math::ln(u1));
        let theta = 2.0 * math::PI * u2;
        self.cached_gaussian = Some(r * math::sin(theta));
        r * math::cos(theta)
    }
}
