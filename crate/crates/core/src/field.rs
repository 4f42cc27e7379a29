//! Scalar and vector fields in sample space and coefficient space.
//!
//! Coefficients are normalized as `c(k) = n⁻³ Σ_j f(x_j) e^{-i k·x_j}`, so
//! `f(x_j) = Σ_k c(k) e^{i k·x_j}` and Plancherel reads
//! `Σ_k |c(k)|² = (2π)⁻³ ∫ |f|² dx` with the Riemann-sum quadrature of
//! [`crate::norms::lp_norm`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;

/// Relative tolerance on Hermitian-symmetry violations accepted by
/// [`SpectralField::inverse_transform`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl RealField {
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        Ok(Self { grid, samples })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            samples: vec![0.0; grid.len()],
        }
    }

    /// Sample `f(x₁, x₂, x₃)` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut samples = Vec::with_capacity(grid.len());
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    samples.push(f(grid.coord(a), grid.coord(b), grid.coord(c)));
                }
            }
        }
        Self { grid, samples }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// First non-finite sample, if any.
    pub fn first_non_finite(&self) -> Option<(usize, f64)> {
        self.samples
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite())
            .map(|(i, &v)| (i, v))
    }

    pub fn forward_transform(&self) -> Result<SpectralField> {
        if let Some((idx, value)) = self.first_non_finite() {
            return Err(Error::NonFinite {
                index: self.grid.unravel(idx),
                value,
            });
        }
        Ok(SpectralField {
            grid: self.grid,
            coeffs: fft::forward_real(self.grid, &self.samples),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField {
            grid: self.grid,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, k: [i64; 3]) -> Complex64 {
        self.coeffs[self.grid.mode_index(k)]
    }

    /// Set `c(k)` and `c(-k) = conj c(k)` together.
    pub fn set_mode_pair(&mut self, k: [i64; 3], value: Complex64) {
        let idx = self.grid.mode_index(k);
        let cj = self.grid.conjugate_index(idx);
        if cj == idx {
            self.coeffs[idx] = Complex64::new(value.re, 0.0);
        } else {
            self.coeffs[idx] = value;
            self.coeffs[cj] = value.conj();
        }
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Worst `|c(k) - conj c(-k)|`, relative to the largest coefficient,
    /// with the wavevector where it occurs.
    pub fn hermitian_violation(&self) -> (f64, [i64; 3]) {
        let scale = self.max_abs();
        let mut worst = (0.0, [0, 0, 0]);
        if scale == 0.0 {
            return worst;
        }
        for (idx, c) in self.coeffs.iter().enumerate() {
            let cj = self.coeffs[self.grid.conjugate_index(idx)].conj();
            let v = (c - cj).norm() / scale;
            if v > worst.0 || v.is_nan() {
                worst = (v, self.grid.wavevector(idx));
            }
        }
        worst
    }

    pub fn inverse_transform(&self) -> Result<RealField> {
        let (violation, k) = self.hermitian_violation();
        if !(violation <= HERMITIAN_TOLERANCE) {
            return Err(Error::NotHermitian { k, violation });
        }
        Ok(self.inverse_unchecked())
    }

    /// Inverse transform without the symmetry check; the imaginary part is
    /// discarded.
    pub(crate) fn inverse_unchecked(&self) -> RealField {
        RealField {
            grid: self.grid,
            samples: fft::inverse_real(self.grid, &self.coeffs),
        }
    }

    /// `Σ_k |c(k)|²`.
    pub fn power(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Apply a radial or general multiplier `m(k)` (real-valued).
    pub fn apply_real_multiplier(&self, m: impl Fn([i64; 3]) -> f64) -> SpectralField {
        let g = self.grid;
        let n = g.n();
        let mut out = self.coeffs.clone();
        let mut idx = 0;
        for a in 0..n {
            let ka = g.wavenumber(a);
            for b in 0..n {
                let kb = g.wavenumber(b);
                for c in 0..n {
                    out[idx] *= m([ka, kb, g.wavenumber(c)]);
                    idx += 1;
                }
            }
        }
        SpectralField {
            grid: g,
            coeffs: out,
        }
    }

    pub fn scale(&self, s: f64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.grid.check_same(&other.grid)?;
        Ok(SpectralField {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.grid.check_same(&other.grid)?;
        Ok(SpectralField {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Max coefficient difference to another field.
    pub fn max_diff(&self, other: &SpectralField) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Copy with the `k = 0` coefficient removed.
    pub fn without_mean(&self) -> SpectralField {
        let mut out = self.clone();
        out.coeffs[0] = Complex64::default();
        out
    }
}

/// Three components sharing a grid and a representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector3<F> {
    components: [F; 3],
}

pub type SpectralVector = Vector3<SpectralField>;
pub type RealVector = Vector3<RealField>;

pub(crate) trait HasGrid {
    fn grid_of(&self) -> Grid;
}

impl HasGrid for RealField {
    fn grid_of(&self) -> Grid {
        self.grid
    }
}

impl HasGrid for SpectralField {
    fn grid_of(&self) -> Grid {
        self.grid
    }
}

#[allow(private_bounds)]
impl<F: HasGrid> Vector3<F> {
    /// Bundle three components; rejects mixed grids.
    pub fn new(components: [F; 3]) -> Result<Self> {
        let g = components[0].grid_of();
        for c in &components[1..] {
            g.check_same(&c.grid_of())?;
        }
        Ok(Self { components })
    }

    pub fn grid(&self) -> Grid {
        self.components[0].grid_of()
    }
}

impl<F> Vector3<F> {
    pub(crate) fn from_components_unchecked(components: [F; 3]) -> Self {
        Self { components }
    }

    pub fn components(&self) -> &[F; 3] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &F {
        &self.components[axis]
    }

    pub fn into_components(self) -> [F; 3] {
        self.components
    }

    pub fn map<G>(&self, f: impl Fn(&F) -> G) -> Vector3<G> {
        Vector3 {
            components: [
                f(&self.components[0]),
                f(&self.components[1]),
                f(&self.components[2]),
            ],
        }
    }
}

impl SpectralVector {
    pub fn zeros(grid: Grid) -> Self {
        Self::from_components_unchecked([
            SpectralField::zeros(grid),
            SpectralField::zeros(grid),
            SpectralField::zeros(grid),
        ])
    }

    pub fn inverse_transform(&self) -> Result<RealVector> {
        let g = self.grid();
        for c in &self.components {
            let (violation, k) = c.hermitian_violation();
            if !(violation <= HERMITIAN_TOLERANCE) {
                return Err(Error::NotHermitian { k, violation });
            }
        }
        Ok(self.inverse_unchecked(g))
    }

    pub(crate) fn inverse_unchecked(&self, g: Grid) -> RealVector {
        let [a, b, c] = &self.components;
        let mut out =
            fft::inverse_real_many(g, &[a.coeffs(), b.coeffs(), c.coeffs()]).into_iter();
        let mut next = || RealField::from_vec_unchecked(g, out.next().unwrap());
        Vector3::from_components_unchecked([next(), next(), next()])
    }

    pub fn power(&self) -> f64 {
        self.components.iter().map(|c| c.power()).sum()
    }

    pub fn scale(&self, s: f64) -> SpectralVector {
        self.map(|c| c.scale(s))
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    pub fn max_diff(&self, other: &SpectralVector) -> f64 {
        (0..3).fold(0.0, |m, i| {
            m.max(self.components[i].max_diff(&other.components[i]))
        })
    }

    pub fn add(&self, other: &SpectralVector) -> Result<SpectralVector> {
        Ok(Vector3::from_components_unchecked([
            self.components[0].add(&other.components[0])?,
            self.components[1].add(&other.components[1])?,
            self.components[2].add(&other.components[2])?,
        ]))
    }

    pub fn sub(&self, other: &SpectralVector) -> Result<SpectralVector> {
        Ok(Vector3::from_components_unchecked([
            self.components[0].sub(&other.components[0])?,
            self.components[1].sub(&other.components[1])?,
            self.components[2].sub(&other.components[2])?,
        ]))
    }
}

impl RealVector {
    pub fn forward_transform(&self) -> Result<SpectralVector> {
        let g = self.grid();
        for c in &self.components {
            if let Some((idx, value)) = c.first_non_finite() {
                return Err(Error::NonFinite {
                    index: g.unravel(idx),
                    value,
                });
            }
        }
        let [a, b, c] = &self.components;
        let mut out =
            fft::forward_real_many(g, &[a.samples(), b.samples(), c.samples()]).into_iter();
        let mut next = || SpectralField::from_vec_unchecked(g, out.next().unwrap());
        Ok(Vector3::from_components_unchecked([next(), next(), next()]))
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> RealField {
        let g = self.grid();
        let [a, b, c] = &self.components;
        let samples = a
            .samples()
            .iter()
            .zip(b.samples())
            .zip(c.samples())
            .map(|((x, y), z)| (x * x + y * y + z * z).sqrt())
            .collect();
        RealField::from_vec_unchecked(g, samples)
    }
}
