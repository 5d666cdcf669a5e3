//! Forward DFT used by the Welch estimator.
//!
//! `X[k] = Σ_t x[t] · exp(-2πi·k·t/n)`, unnormalized. Power-of-two lengths
//! take an iterative radix-2 path; other lengths fall back to a direct
//! O(n²) evaluation with precomputed twiddles, which is fine at the segment
//! lengths this crate deals with.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math;

#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    /// Twiddles exp(-2πi·k/len) for k = 0..len.
    twiddles: Vec<Complex64>,
    bit_reverse: Option<Vec<u32>>,
}

impl FftPlan {
    pub fn new(len: usize) -> Self {
        assert!(len >= 1, "transform length must be >= 1");
        let twiddles = (0..len)
            .map(|k| {
                let angle = -2.0 * math::PI * k as f64 / len as f64;
                Complex64::new(math::cos(angle), math::sin(angle))
            })
            .collect();
        let bit_reverse = if len.is_power_of_two() && len > 1 {
            let bits = len.trailing_zeros();
            Some(
                (0..len as u32)
                    .map(|i| i.reverse_bits() >> (32 - bits))
                    .collect(),
            )
        } else {
            None
        };
        Self {
            len,
            twiddles,
            bit_reverse,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place forward transform; `buf.len()` must equal the plan length.
    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len);
        match &self.bit_reverse {
            Some(rev) => self.radix2(buf, rev),
            None => self.direct(buf),
        }
    }

    fn radix2(&self, buf: &mut [Complex64], rev: &[u32]) {
        let n = self.len;
        for i in 0..n {
            let j = rev[i] as usize;
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut width = 2;
        while width <= n {
            let stride = n / width;
            for start in (0..n).step_by(width) {
                for k in 0..width / 2 {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + width / 2] * w;
                    buf[start + k] = a + b;
                    buf[start + k + width / 2] = a - b;
                }
            }
            width *= 2;
        }
    }

    fn direct(&self, buf: &mut [Complex64]) {
        let n = self.len;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, x) in buf.iter().enumerate() {
                acc += x * self.twiddles[(k * t) % n];
            }
            *o = acc;
        }
        buf.copy_from_slice(&out);
    }
}
