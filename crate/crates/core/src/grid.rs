//! Periodic box `[0, 2π)³` and its integer wavenumber lattice.
//!
//! Samples are stored in row-major order with the third axis fastest:
//! `index = (j1 * n + j2) * n + j3`. Spectral arrays use the same layout
//! in FFT order, so storage index `i` along an axis carries wavenumber
//! `i` for `i <= n/2` and `i - n` otherwise. The Nyquist index `n/2`
//! therefore maps to `k = +n/2`, giving the lattice `{-n/2+1, ..., n/2}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn box_length(&self) -> f64 {
        2.0 * PI
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Quadrature weight of one sample, `spacing³`.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        let h = self.spacing();
        h * h * h
    }

    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(3)
    }

    #[inline]
    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    /// Physical coordinate of sample `j` along any axis.
    #[inline]
    pub fn coord(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n + i2) * self.n + i3
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Signed wavenumber carried by storage index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Wavenumber used by first-derivative multipliers: zero on the Nyquist
    /// plane, where an odd derivative of the real Nyquist mode is undefined.
    #[inline]
    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.wavenumber(i) as f64
        }
    }

    /// Storage index of wavenumber `k` (taken modulo `n`).
    #[inline]
    pub fn storage_index(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let [a, b, c] = self.unravel(idx);
        [self.wavenumber(a), self.wavenumber(b), self.wavenumber(c)]
    }

    /// Flat index of the mode `-k`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let [a, b, c] = self.unravel(idx);
        self.index((n - a) % n, (n - b) % n, (n - c) % n)
    }

    pub fn mode_index(&self, k: [i64; 3]) -> usize {
        self.index(
            self.storage_index(k[0]),
            self.storage_index(k[1]),
            self.storage_index(k[2]),
        )
    }

    /// Largest |k|∞ kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Largest Euclidean |k| present on the lattice.
    pub fn max_wavenumber_magnitude(&self) -> f64 {
        3f64.sqrt() * (self.n / 2) as f64
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch(self.n, other.n));
        }
        Ok(())
    }
}
