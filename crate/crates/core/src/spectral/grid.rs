use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use super::fft::Plan;
use crate::{Error, Result};

const NO_BAND: u8 = u8::MAX;

/// Periodic lattice `[0, 2π)^dim` with `points` samples per axis.
///
/// Spectral arrays share the sample layout: row-major with the last axis
/// contiguous, index `k` along an axis standing for the integer frequency `k`
/// when `k < points/2` and `k - points` otherwise. Cloning is cheap.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    dim: usize,
    points: usize,
    len: usize,
    plan: Plan,
    freq: Vec<[f64; 3]>,
    odd: Vec<[f64; 3]>,
    norm_sq: Vec<f64>,
    band: Vec<u8>,
    band_count: usize,
    neg: Vec<usize>,
    pad2: Arc<Padding>,
}

/// Zero-padded companion grid used to evaluate pointwise products alias-free.
pub struct Padding {
    pub(crate) factor: usize,
    pub(crate) points: usize,
    pub(crate) len: usize,
    pub(crate) plan: Plan,
    /// base spectral index -> padded spectral index; `None` for modes with a
    /// Nyquist component, which have no symmetric partner
    pub(crate) map: Vec<Option<usize>>,
}

impl Padding {
    fn new(dim: usize, points: usize, factor: usize) -> Self {
        let padded = points * factor;
        let half = (points / 2) as i64;
        let len = points.pow(dim as u32);
        let map = (0..len)
            .map(|idx| {
                let mut rest = idx;
                let mut target = 0usize;
                let mut stride = 1usize;
                for _ in 0..dim {
                    let k = rest % points;
                    rest /= points;
                    let f = axis_frequency(k, points);
                    if f == -half {
                        return None;
                    }
                    let kp = if f >= 0 { f as usize } else { (padded as i64 + f) as usize };
                    target += kp * stride;
                    stride *= padded;
                }
                Some(target)
            })
            .collect();
        Padding {
            factor,
            points: padded,
            len: padded.pow(dim as u32),
            plan: Plan::new(padded),
            map,
        }
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn points(&self) -> usize {
        self.points
    }
}

fn axis_frequency(k: usize, points: usize) -> i64 {
    if k < points / 2 {
        k as i64
    } else {
        k as i64 - points as i64
    }
}

impl Grid {
    /// `dim ∈ {2, 3}`, `points` a power of two, at least 8.
    pub fn new(dim: usize, points: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) || points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid { dim, points });
        }
        let len = points.pow(dim as u32);
        let half = (points / 2) as i64;
        let mut freq = Vec::with_capacity(len);
        let mut odd = Vec::with_capacity(len);
        let mut norm_sq = Vec::with_capacity(len);
        let mut band = Vec::with_capacity(len);
        let mut neg = Vec::with_capacity(len);
        for idx in 0..len {
            let mut f = [0.0; 3];
            let mut o = [0.0; 3];
            let mut m: i64 = 0;
            let mut rest = idx;
            let mut mirror = 0usize;
            let mut stride = 1usize;
            for axis in (0..dim).rev() {
                let digit = rest % points;
                let k = axis_frequency(digit, points);
                rest /= points;
                mirror += ((points - digit) % points) * stride;
                stride *= points;
                f[axis] = k as f64;
                o[axis] = if k == -half { 0.0 } else { k as f64 };
                m += k * k;
            }
            freq.push(f);
            odd.push(o);
            norm_sq.push(m as f64);
            band.push(band_of_norm_sq(m));
            neg.push(mirror);
        }
        // |ξ| < sqrt(dim)·points/2 < points for dim <= 3
        let band_count = (points / 2).trailing_zeros() as usize + 1;
        debug_assert!(band.iter().all(|&b| b == NO_BAND || (b as usize) < band_count));
        Ok(Grid {
            inner: Arc::new(GridInner {
                dim,
                points,
                len,
                plan: Plan::new(points),
                freq,
                odd,
                norm_sq,
                band,
                band_count,
                neg,
                pad2: Arc::new(Padding::new(dim, points, 2)),
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    /// Samples per axis.
    pub fn points(&self) -> usize {
        self.inner.points
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.inner.points as f64
    }

    /// Measure of the torus, `(2π)^dim`.
    pub fn volume(&self) -> f64 {
        (0..self.inner.dim).fold(1.0, |v, _| v * 2.0 * PI)
    }

    /// Quadrature weight of one sample.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.inner.len as f64
    }

    pub(crate) fn plan(&self) -> &Plan {
        &self.inner.plan
    }

    /// Sample coordinates of a linear index (unused axes are 0).
    pub fn coordinates(&self, idx: usize) -> [f64; 3] {
        let n = self.inner.points;
        let mut x = [0.0; 3];
        let mut rest = idx;
        for axis in (0..self.inner.dim).rev() {
            x[axis] = (rest % n) as f64 * self.spacing();
            rest /= n;
        }
        x
    }

    /// Integer frequency of a spectral index.
    #[inline]
    pub fn frequency(&self, idx: usize) -> &[f64; 3] {
        &self.inner.freq[idx]
    }

    /// Frequency used by odd-order multipliers: Nyquist components are zeroed
    /// because the real transform has no partner mode for them.
    #[inline]
    pub fn odd_frequency(&self, idx: usize) -> &[f64; 3] {
        &self.inner.odd[idx]
    }

    /// `|ξ|²`
    #[inline]
    pub fn norm_sq(&self, idx: usize) -> f64 {
        self.inner.norm_sq[idx]
    }

    /// Dyadic shell `2^j <= |ξ| < 2^{j+1}`, `None` for the zero mode.
    #[inline]
    pub fn band(&self, idx: usize) -> Option<usize> {
        match self.inner.band[idx] {
            NO_BAND => None,
            b => Some(b as usize),
        }
    }

    /// Spectral index of `-ξ`.
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        self.inner.neg[idx]
    }

    /// `log2(points/2) + 1`
    pub fn band_count(&self) -> usize {
        self.inner.band_count
    }

    /// True when no axis sits at the Nyquist frequency.
    #[inline]
    pub fn is_resolved(&self, idx: usize) -> bool {
        self.inner.pad2.map[idx].is_some()
    }

    /// Padding for products of `degree` band-limited factors: the factor is
    /// `⌈(degree+1)/2⌉` rounded up to a power of two.
    pub fn padding(&self, degree: usize) -> Arc<Padding> {
        let factor = (degree + 1).div_ceil(2).max(2).next_power_of_two();
        if factor == 2 {
            self.inner.pad2.clone()
        } else {
            Arc::new(Padding::new(self.inner.dim, self.inner.points, factor))
        }
    }

    pub fn same(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.dim == other.inner.dim && self.inner.points == other.inner.points)
    }

    pub(crate) fn check(&self, other: &Grid) -> Result<()> {
        if self.same(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

fn band_of_norm_sq(m: i64) -> u8 {
    if m == 0 {
        return NO_BAND;
    }
    // largest j with 4^j <= m
    let mut j = 0u8;
    while 4i64.pow(j as u32 + 1) <= m {
        j += 1;
    }
    j
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid({}D, {} points/axis)", self.inner.dim, self.inner.points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::new(4, 16).is_err());
        assert!(Grid::new(2, 12).is_err());
        assert!(Grid::new(2, 4).is_err());
        assert!(Grid::new(3, 8).is_ok());
    }

    #[test]
    fn bands_partition_nonzero_lattice() {
        for &(dim, n) in &[(2usize, 8usize), (2, 64), (3, 16)] {
            let grid = Grid::new(dim, n).unwrap();
            assert_eq!(grid.band_count(), (n / 2).trailing_zeros() as usize + 1);
            for idx in 0..grid.len() {
                let m = grid.norm_sq(idx);
                match grid.band(idx) {
                    None => assert_eq!(m, 0.0),
                    Some(j) => {
                        let r = crate::math::sqrt(m);
                        assert!((1u64 << j) as f64 <= r && r < (1u64 << (j + 1)) as f64);
                        assert!(j < grid.band_count());
                    }
                }
            }
        }
    }

    #[test]
    fn padding_factors() {
        let grid = Grid::new(2, 16).unwrap();
        assert_eq!(grid.padding(1).factor(), 2);
        assert_eq!(grid.padding(2).factor(), 2);
        assert_eq!(grid.padding(3).factor(), 2);
        assert_eq!(grid.padding(4).factor(), 4);
        assert_eq!(grid.padding(5).factor(), 4);
    }
}
