//! Radix-2 complex FFT over power-of-two lengths, applied axis by axis.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X_k = Σ x_j e^{-2πi jk/N}`
    Forward,
    /// `x_j = Σ X_k e^{+2πi jk/N}`
    Inverse,
}

/// Precomputed twiddles and bit-reversal for one transform length.
#[derive(Debug, Clone)]
pub struct Plan {
    len: usize,
    twiddles: Vec<Complex64>,
    reversed: Vec<usize>,
}

impl Plan {
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two() && len >= 2, "FFT length must be a power of two");
        let bits = len.trailing_zeros();
        let reversed = (0..len)
            .map(|i| i.reverse_bits() >> (usize::BITS - bits))
            .collect();
        // each twiddle from the library trig so errors do not accumulate
        let twiddles = (0..len / 2)
            .map(|k| math::cis(-2.0 * PI * k as f64 / len as f64))
            .collect();
        Plan { len, twiddles, reversed }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Unnormalized in-place transform of one contiguous line.
    pub fn process(&self, line: &mut [Complex64], direction: Direction) {
        debug_assert_eq!(line.len(), self.len);
        let n = self.len;
        for i in 0..n {
            let j = self.reversed[i];
            if i < j {
                line.swap(i, j);
            }
        }
        let mut width = 2;
        while width <= n {
            let half = width / 2;
            let step = n / width;
            for start in (0..n).step_by(width) {
                let (lo, hi) = line[start..start + width].split_at_mut(half);
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if direction == Direction::Inverse {
                        w = w.conj();
                    }
                    let a = lo[k];
                    let b = hi[k] * w;
                    lo[k] = a + b;
                    hi[k] = a - b;
                }
            }
            width *= 2;
        }
    }

    /// Unnormalized transform of an `dim`-dimensional row-major cube with
    /// `self.len()` points per axis.
    pub fn process_nd(&self, data: &mut [Complex64], dim: usize, direction: Direction) {
        let n = self.len;
        debug_assert_eq!(data.len(), n.pow(dim as u32));
        // last axis is contiguous
        for line in data.chunks_exact_mut(n) {
            self.process(line, direction);
        }
        if dim == 1 {
            return;
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        let total = data.len();
        for axis in 0..dim - 1 {
            let stride = n.pow((dim - 1 - axis) as u32);
            let block = stride * n;
            for base in (0..total).step_by(block) {
                for offset in 0..stride {
                    let first = base + offset;
                    for (k, slot) in scratch.iter_mut().enumerate() {
                        *slot = data[first + k * stride];
                    }
                    self.process(&mut scratch, direction);
                    for (k, value) in scratch.iter().enumerate() {
                        data[first + k * stride] = *value;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, v)| {
                    acc + v * math::cis(-2.0 * PI * (j * k % n) as f64 / n as f64)
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for &n in &[2usize, 4, 8, 32, 64] {
            let x: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let mut y = x.clone();
            Plan::new(n).process(&mut y, Direction::Forward);
            let reference = naive_dft(&x);
            for (a, b) in y.iter().zip(&reference) {
                assert!((a - b).norm_sqr().sqrt() < 1e-12 * n as f64);
            }
        }
    }

    #[test]
    fn nd_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 8;
        let x: Vec<Complex64> = (0..n * n * n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let plan = Plan::new(n);
        let mut y = x.clone();
        plan.process_nd(&mut y, 3, Direction::Forward);
        plan.process_nd(&mut y, 3, Direction::Inverse);
        for (a, b) in y.iter().zip(&x) {
            assert!((a / (n * n * n) as f64 - b).norm_sqr().sqrt() < 1e-14);
        }
    }
}
