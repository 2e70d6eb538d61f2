//! In-place radix-2 complex FFT.
//!
//! Grid lengths are powers of two by construction, so a plain iterative
//! Cooley-Tukey kernel with a precomputed twiddle table is all that is
//! needed. `forward` computes `X_k = Σ_j x_j e^{-2πi jk/n}`, `inverse` the
//! conjugate sum scaled by `1/n`, so `inverse(forward(x)) == x` to roundoff.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64 as C64;
// used for f64 math in the no_std build; std test builds resolve inherent methods
#[allow(unused_imports)]
use num_traits::Float;

pub fn is_power_of_two(n: usize) -> bool {
    n >= 2 && n & (n - 1) == 0
}

/// Precomputed plan for one transform length.
pub struct Fft {
    len: usize,
    // twiddles[k] = exp(-2πi k / len) for k < len/2
    twiddles: Vec<C64>,
}

impl Fft {
    pub fn new(len: usize) -> Self {
        debug_assert!(is_power_of_two(len));
        let half = len / 2;
        let mut twiddles = Vec::with_capacity(half);
        for k in 0..half {
            let ang = -2.0 * PI * (k as f64) / (len as f64);
            twiddles.push(C64::new(ang.cos(), ang.sin()));
        }
        Fft { len, twiddles }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn forward(&self, buf: &mut [C64]) {
        self.process(buf, false);
    }

    pub fn inverse(&self, buf: &mut [C64]) {
        self.process(buf, true);
        let s = 1.0 / self.len as f64;
        for v in buf.iter_mut() {
            *v *= s;
        }
    }

    /// Unscaled conjugate-kernel transform: `Σ_j x_j e^{+2πi jk/n}`.
    pub fn backward_unscaled(&self, buf: &mut [C64]) {
        self.process(buf, true);
    }

    fn process(&self, buf: &mut [C64], inverse: bool) {
        let n = self.len;
        assert_eq!(buf.len(), n);

        // bit-reversal permutation
        let mut j = 0usize;
        for i in 0..n {
            if i < j {
                buf.swap(i, j);
            }
            let mut mask = n >> 1;
            while mask != 0 && j & mask != 0 {
                j &= !mask;
                mask >>= 1;
            }
            j |= mask;
        }

        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let step = n / size;
            let mut start = 0;
            while start < n {
                for k in 0..half {
                    let mut tw = self.twiddles[k * step];
                    if inverse {
                        tw = tw.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * tw;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
                start += size;
            }
            size <<= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[C64]) -> Vec<C64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        let ang = -2.0 * PI * (j * k) as f64 / n as f64;
                        x[j] * C64::new(ang.cos(), ang.sin())
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let n = 64;
        let plan = Fft::new(n);
        let mut x: Vec<C64> = (0..n)
            .map(|j| C64::new((j as f64 * 0.37).sin(), (j as f64 * 0.11).cos()))
            .collect();
        let want = naive_dft(&x);
        plan.forward(&mut x);
        for (a, b) in x.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn roundtrip_identity() {
        let n = 256;
        let plan = Fft::new(n);
        let orig: Vec<C64> = (0..n)
            .map(|j| C64::new((j as f64 * 0.707).sin(), (j as f64).sqrt()))
            .collect();
        let mut x = orig.clone();
        plan.forward(&mut x);
        plan.inverse(&mut x);
        for (a, b) in x.iter().zip(orig.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
