//! Diagnostic pressure from `−Δp = ∂ᵢ∂ⱼ(uᵢuⱼ)`, and measured ratios for
//! the Calderón-Zygmund and `‖p‖_q ≲ ‖u‖²_{2q}` estimates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{RealField, SpectralField};
use crate::norms::lp_norm_samples;
use crate::ops;
use crate::ratio::Ratio;

use super::nonlinear::mask_table;
use super::state::FlowState;

/// Pressure coefficients, mean zero; products are dealiased.
pub fn pressure_coeffs(state: &FlowState) -> SpectralField {
    let g = state.grid();
    let [a, b, c] = state.u.components();
    let u = fft::inverse_real_many(g, &[a.coeffs(), b.coeffs(), c.coeffs()]);
    let pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
    let prods: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&(i, j)| u[i].iter().zip(&u[j]).map(|(x, y)| x * y).collect())
        .collect();
    let refs: Vec<&[f64]> = prods.iter().map(|p| p.as_slice()).collect();
    let hat = fft::forward_real_many(g, &refs);
    let mask = mask_table(g);
    let mut p = vec![Complex64::default(); g.len()];
    for (idx, out) in p.iter_mut().enumerate().skip(1) {
        if !mask[idx] {
            continue;
        }
        let k = g.wavevector(idx).map(|v| v as f64);
        let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let s = hat[0][idx] * (k[0] * k[0])
            + hat[1][idx] * (k[1] * k[1])
            + hat[2][idx] * (k[2] * k[2])
            + hat[3][idx] * (2.0 * k[0] * k[1])
            + hat[4][idx] * (2.0 * k[0] * k[2])
            + hat[5][idx] * (2.0 * k[1] * k[2]);
        *out = -s / kk;
    }
    SpectralField::from_vec_unchecked(g, p)
}

pub fn pressure_solve(state: &FlowState) -> RealField {
    pressure_coeffs(state).inverse_unchecked()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureRatios {
    pub q: f64,
    /// `‖∇p‖_q / ‖|∇u||u|‖_q`.
    pub gradient: Ratio,
    /// `‖p‖_q / ‖u‖²_{2q}`.
    pub pressure: Ratio,
}

pub fn check_pressure_estimates(state: &FlowState, q_list: &[f64]) -> Result<Vec<PressureRatios>> {
    for &q in q_list {
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pressure estimates need 1 < q < ∞, got {q}"
            )));
        }
    }
    let g = state.grid();
    let cell = g.cell_volume();
    let p = pressure_coeffs(state);
    let grad_p = ops::gradient(&p).inverse_unchecked(g).magnitude();
    let p_real = p.inverse_unchecked();
    let u = state.u.inverse_unchecked(g).magnitude();
    let grad = ops::velocity_gradient(&state.u);
    let fields: Vec<&[Complex64]> = grad.iter().flatten().map(|f| f.coeffs()).collect();
    let du = fft::inverse_real_many(g, &fields);
    let frob: Vec<f64> = (0..g.len())
        .map(|x| du.iter().map(|d| d[x] * d[x]).sum::<f64>().sqrt())
        .collect();
    let product: Vec<f64> = frob.iter().zip(u.samples()).map(|(a, b)| a * b).collect();
    Ok(q_list
        .iter()
        .map(|&q| {
            let u2q = lp_norm_samples(u.samples(), cell, 2.0 * q);
            PressureRatios {
                q,
                gradient: Ratio::new(
                    lp_norm_samples(grad_p.samples(), cell, q),
                    lp_norm_samples(&product, cell, q),
                ),
                pressure: Ratio::new(lp_norm_samples(p_real.samples(), cell, q), u2q * u2q),
            }
        })
        .collect())
}
