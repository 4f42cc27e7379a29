//! Seeded random fields for calibration ensembles and tests.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{SpectralField, SpectralVector, Vector3};
use crate::grid::Grid;
use crate::ops;

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub seed: u64,
    /// Coefficient magnitudes are shaped by `|k|^slope`.
    pub slope: f64,
    /// Root-mean-square value of the field (per vector, the rms speed).
    pub amplitude: f64,
    /// Restrict to the modes kept by the 2/3 rule.
    pub dealias: bool,
    /// Optional hard cutoff on `|k|∞`.
    pub max_wavenumber: Option<i64>,
}

impl RandomSpec {
    pub fn seeded(seed: u64) -> Self {
        Self {
            seed,
            slope: -2.0,
            amplitude: 1.0,
            dealias: true,
            max_wavenumber: None,
        }
    }

    pub fn with_slope(mut self, slope: f64) -> Self {
        self.slope = slope;
        self
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn with_max_wavenumber(mut self, k: i64) -> Self {
        self.max_wavenumber = Some(k);
        self
    }
}

/// Keep mode `k`: nonzero, off the Nyquist planes, inside the band.
fn keeps(grid: Grid, k: [i64; 3], spec: &RandomSpec) -> bool {
    let half = (grid.n() / 2) as i64;
    k != [0, 0, 0]
        && !k.contains(&half)
        && (!spec.dealias || ops::dealias_keeps(grid, k))
        && spec
            .max_wavenumber
            .is_none_or(|m| k.iter().all(|ki| ki.abs() <= m))
}

/// Stream id of wavevector `k`; injective for `|kᵢ| < 2²⁰`.
fn stream_of(k: [i64; 3]) -> u64 {
    let enc = |v: i64| (v + (1 << 20)) as u64 & ((1 << 21) - 1);
    (enc(k[0]) << 42) | (enc(k[1]) << 21) | enc(k[2])
}

/// Shaped complex Gaussian coefficients for `count` components. Each mode
/// draws from its own stream keyed by `(seed, k)`, so a given seed and band
/// define the same field on every grid that resolves it.
fn shaped_coefficients(grid: Grid, spec: &RandomSpec, count: usize) -> Vec<Vec<Complex64>> {
    let mut out = vec![vec![Complex64::default(); grid.len()]; count];
    for idx in 0..grid.len() {
        let k = grid.wavevector(idx);
        if !keeps(grid, k, spec) {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(stream_of(k));
        let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        let weight = kk.sqrt().powf(spec.slope);
        for comp in out.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            comp[idx] = Complex64::new(re, im) * weight;
        }
    }
    for comp in out.iter_mut() {
        fft::symmetrize(grid, comp);
    }
    out
}

/// Mean-zero Gaussian scalar field with no Nyquist content.
pub fn random_scalar(grid: Grid, spec: &RandomSpec) -> SpectralField {
    let coeffs = shaped_coefficients(grid, spec, 1).pop().unwrap();
    let f = SpectralField::from_vec_unchecked(grid, coeffs);
    let p = f.power();
    if p == 0.0 {
        return f;
    }
    f.scale(spec.amplitude / p.sqrt())
}

/// Mean-zero, divergence-free Gaussian vector field with no Nyquist content.
pub fn random_divfree(grid: Grid, spec: &RandomSpec) -> SpectralVector {
    let mut it = shaped_coefficients(grid, spec, 3).into_iter();
    let mut next = || SpectralField::from_vec_unchecked(grid, it.next().unwrap());
    let raw = Vector3::from_components_unchecked([next(), next(), next()]);
    let v = ops::leray_project(&raw);
    let p = v.power();
    if p == 0.0 {
        return v;
    }
    v.scale(spec.amplitude / p.sqrt())
}

/// Coefficients of `x ↦ f(2x)`; needs `|k|∞ < n/4` in the input.
pub fn dilate_by_two(f: &SpectralField) -> Result<SpectralField> {
    let g = f.grid();
    let quarter = (g.n() / 4) as i64;
    let mut out = SpectralField::zeros(g);
    for (idx, c) in f.coeffs().iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let k = g.wavevector(idx);
        if k.iter().any(|ki| ki.abs() >= quarter) {
            return Err(Error::InvalidParameter(format!(
                "dilation needs |k|∞ < {quarter}, found mode {k:?}"
            )));
        }
        let target = g.mode_index([2 * k[0], 2 * k[1], 2 * k[2]]);
        out.coeffs_mut()[target] = *c;
    }
    Ok(out)
}

pub fn dilate_vector_by_two(v: &SpectralVector) -> Result<SpectralVector> {
    let [a, b, c] = v.components();
    Ok(Vector3::from_components_unchecked([
        dilate_by_two(a)?,
        dilate_by_two(b)?,
        dilate_by_two(c)?,
    ]))
}
