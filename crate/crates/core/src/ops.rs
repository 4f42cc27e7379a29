//! Fourier-multiplier differential operators and the Leray projector.
//!
//! First derivatives use the derivative wavenumber of
//! [`Grid::derivative_wavenumber`], which vanishes on the Nyquist plane of
//! the differentiated axis. The Leray projector is built from the same
//! wavenumbers so that `divergence(leray_project(v)) = 0` holds to round-off
//! for every input, Nyquist content included. The Laplacian uses the full
//! `-|k|²`.

use num_complex::Complex64;

use crate::error::Result;
use crate::field::{SpectralField, SpectralVector, Vector3};
use crate::grid::Grid;

/// Coordinate axis, zero-based (`0` is `x₁`).
pub type Axis = usize;

pub fn partial_derivative(f: &SpectralField, axis: Axis) -> SpectralField {
    assert!(axis < 3, "axis must be 0, 1 or 2");
    let g = f.grid();
    let n = g.n();
    let mut out = f.coeffs().to_vec();
    let mut idx = 0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let k = match axis {
                    0 => g.derivative_wavenumber(a),
                    1 => g.derivative_wavenumber(b),
                    _ => g.derivative_wavenumber(c),
                };
                out[idx] *= Complex64::new(0.0, k);
                idx += 1;
            }
        }
    }
    SpectralField::from_vec_unchecked(g, out)
}

pub fn gradient(f: &SpectralField) -> SpectralVector {
    Vector3::from_components_unchecked([
        partial_derivative(f, 0),
        partial_derivative(f, 1),
        partial_derivative(f, 2),
    ])
}

/// `(∂₁f, ∂₂f)`.
pub fn horizontal_gradient(f: &SpectralField) -> [SpectralField; 2] {
    [partial_derivative(f, 0), partial_derivative(f, 1)]
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    f.apply_real_multiplier(|k| -((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64))
}

/// `∂₁² + ∂₂²`.
pub fn horizontal_laplacian(f: &SpectralField) -> SpectralField {
    f.apply_real_multiplier(|k| -((k[0] * k[0] + k[1] * k[1]) as f64))
}

pub fn vector_laplacian(v: &SpectralVector) -> SpectralVector {
    v.map(laplacian)
}

pub fn divergence(v: &SpectralVector) -> Result<SpectralField> {
    let [a, b, c] = v.components();
    partial_derivative(a, 0)
        .add(&partial_derivative(b, 1))?
        .add(&partial_derivative(c, 2))
}

/// `(∂₂v₃ − ∂₃v₂, ∂₃v₁ − ∂₁v₃, ∂₁v₂ − ∂₂v₁)`.
pub fn curl(v: &SpectralVector) -> Result<SpectralVector> {
    let [a, b, c] = v.components();
    Ok(Vector3::from_components_unchecked([
        partial_derivative(c, 1).sub(&partial_derivative(b, 2))?,
        partial_derivative(a, 2).sub(&partial_derivative(c, 0))?,
        partial_derivative(b, 0).sub(&partial_derivative(a, 1))?,
    ]))
}

/// Full velocity-gradient tensor, `out[i][j] = ∂_j v_i`.
pub fn velocity_gradient(v: &SpectralVector) -> [[SpectralField; 3]; 3] {
    let grad = |f: &SpectralField| {
        [
            partial_derivative(f, 0),
            partial_derivative(f, 1),
            partial_derivative(f, 2),
        ]
    };
    let [a, b, c] = v.components();
    [grad(a), grad(b), grad(c)]
}

/// Remove the gradient part: `v̂ ← v̂ − k (k·v̂)/|k|²` for `k ≠ 0`.
pub fn leray_project(v: &SpectralVector) -> SpectralVector {
    let g = v.grid();
    let mut out = v.clone().into_components();
    project_in_place(g, &mut out);
    Vector3::from_components_unchecked(out)
}

pub(crate) fn project_in_place(g: Grid, comps: &mut [SpectralField; 3]) {
    let n = g.n();
    let [a, b, c] = comps;
    let (a, b, c) = (a.coeffs_mut(), b.coeffs_mut(), c.coeffs_mut());
    let mut idx = 0;
    for i1 in 0..n {
        let k1 = g.derivative_wavenumber(i1);
        for i2 in 0..n {
            let k2 = g.derivative_wavenumber(i2);
            for i3 in 0..n {
                let k3 = g.derivative_wavenumber(i3);
                let kk = k1 * k1 + k2 * k2 + k3 * k3;
                if kk > 0.0 {
                    let dot = (a[idx] * k1 + b[idx] * k2 + c[idx] * k3) / kk;
                    a[idx] -= dot * k1;
                    b[idx] -= dot * k2;
                    c[idx] -= dot * k3;
                }
                idx += 1;
            }
        }
    }
}

/// True when mode `k` survives the 2/3 rule (`|k_i| ≤ n/3` on every axis).
#[inline]
pub fn dealias_keeps(g: Grid, k: [i64; 3]) -> bool {
    let cut = g.dealias_cutoff();
    k.iter().all(|ki| ki.abs() <= cut)
}

/// Zero every mode with some `|k_i| > n/3`.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let g = f.grid();
    f.apply_real_multiplier(|k| if dealias_keeps(g, k) { 1.0 } else { 0.0 })
}

/// Zero the three Nyquist planes.
pub fn remove_nyquist(f: &SpectralField) -> SpectralField {
    let half = (f.grid().n() / 2) as i64;
    f.apply_real_multiplier(|k| if k.contains(&half) { 0.0 } else { 1.0 })
}
