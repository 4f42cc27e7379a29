//! Low/high frequency split of `u₃` at the balancing index `σ`:
//! `2^{(3/2)σ}‖u₃‖₂ = 2^{−εσ}‖∇u₃‖_{Ḃ^{−1+ε}_{∞,∞}}`.
//!
//! `‖u₃‖₂` here is the rms value `(2π)^{−3/2}‖u₃‖_{L²}`: on the torus the
//! plain `L²` norm carries the box volume, which would push `σ` below every
//! resolved block. The factor is absorbed in the low-frequency constant.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lp::{block_norms, build_profile, combine_blocks, BlockRange};
use crate::norms::{l2_norm_spectral, lp_norm_samples};
use crate::ops;
use crate::ratio::Ratio;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencySplitParams {
    pub epsilon: f64,
    pub sigma: f64,
    /// `[σ]`, the integer part.
    pub split: i32,
}

impl FrequencySplitParams {
    /// `σ = log₂(B/L)/(3/2+ε)` for `L = ‖u₃‖₂`, `B = ‖∇u₃‖_{Ḃ^{−1+ε}}`.
    pub fn balance(epsilon: f64, l2: f64, besov: f64) -> Self {
        let sigma = (besov / l2).log2() / (1.5 + epsilon);
        Self {
            epsilon,
            sigma,
            split: sigma.floor() as i32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConstants {
    pub low: f64,
    pub high: f64,
}

impl SplitConstants {
    /// Constant of the combined bound.
    pub fn combined(&self) -> f64 {
        self.low + self.high
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplitOutcome {
    /// `u₃ ≡ 0`.
    Skipped,
    /// `σ` lies outside the resolvable blocks.
    Inconclusive { sigma: f64, range: BlockRange },
    Evaluated(SplitReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitReport {
    pub params: FrequencySplitParams,
    /// rms of `u₃`.
    pub l2: f64,
    /// `‖∇u₃‖_{Ḃ^{−1+ε}_{∞,∞}}`.
    pub besov: f64,
    /// `Σ_{j≤[σ]} ‖Δ̇ⱼu₃‖_∞ / (2^{(3/2)[σ]}‖u₃‖₂)`.
    pub low: Ratio,
    /// `Σ_{j≥[σ]+1} ‖Δ̇ⱼu₃‖_∞ / (2^{−ε([σ]+1)}‖∇u₃‖_{Ḃ^{−1+ε}})`.
    pub high: Ratio,
    /// `‖u₃‖_∞ / (‖u₃‖₂^{ε/(3/2+ε)} ‖∇u₃‖^{(3/2)/(3/2+ε)}_{Ḃ^{−1+ε}})`.
    pub combined: Ratio,
}

impl SplitReport {
    /// `‖u₃‖_∞ ≤ (C_low + C_high)·M`.
    pub fn dominated(&self, c: &SplitConstants) -> bool {
        self.combined.within(c.combined() * (1.0 + 1e-12))
    }
}

pub fn frequency_split_verify(u3: &SpectralField, epsilon: f64) -> Result<SplitOutcome> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "frequency split needs 0 < ε < 1, got {epsilon}"
        )));
    }
    let g = u3.grid();
    let l2 = l2_norm_spectral(&u3.without_mean()) / g.volume().sqrt();
    if l2 == 0.0 {
        return Ok(SplitOutcome::Skipped);
    }
    let profile = build_profile();
    let range = BlockRange::for_grid(g);
    let besov = (0..3)
        .map(|i| {
            let d = ops::partial_derivative(u3, i);
            combine_blocks(
                block_norms(&d, f64::INFINITY, &profile, range).iter(),
                epsilon - 1.0,
                f64::INFINITY,
            )
        })
        .fold(0.0, f64::max);
    let params = FrequencySplitParams::balance(epsilon, l2, besov);
    if !(params.sigma >= range.j_min as f64 && params.sigma < (range.j_max + 1) as f64) {
        return Ok(SplitOutcome::Inconclusive {
            sigma: params.sigma,
            range,
        });
    }
    let m = params.split;
    let blocks = block_norms(u3, f64::INFINITY, &profile, range);
    let low: f64 = blocks.iter().filter(|(j, _)| *j <= m).map(|(_, v)| v).sum();
    let high: f64 = blocks.iter().filter(|(j, _)| *j > m).map(|(_, v)| v).sum();
    let sup = lp_norm_samples(&u3.inverse_unchecked().into_samples(), g.cell_volume(), f64::INFINITY);
    let a = 1.5 + epsilon;
    let bound = l2.powf(epsilon / a) * besov.powf(1.5 / a);
    Ok(SplitOutcome::Evaluated(SplitReport {
        params,
        l2,
        besov,
        low: Ratio::new(low, 2f64.powf(1.5 * m as f64) * l2),
        high: Ratio::new(high, 2f64.powf(-epsilon * (m + 1) as f64) * besov),
        combined: Ratio::new(sup, bound),
    }))
}
