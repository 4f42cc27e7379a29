//! Gronwall bounds `B(t) = v₀ exp(C ∫₀ᵗ a)` and the instantaneous rate
//! constant used to calibrate `C`.
//!
//! The companion `y = ‖∇u‖²` obeys `dy/dt = 2S − 2νQ`. Along the scaling
//! `u ↦ λu` the growth rate per unit criterion rate is
//! `g(λ) = (2λS − 2νQ)/(y Σ cᵢ λ^{qᵢ})` with `cᵢ = Aᵢ^{qᵢ}`; the calibrated
//! constant takes the supremum over `λ > 0`, so it does not depend on the
//! amplitude of the ensemble.

use crate::error::{Error, Result};
use crate::lp::{block_norms, build_profile, combine_blocks, BlockRange};
use crate::norms::lp_norm_samples;
use crate::solver::FlowState;

use super::quantities::Snapshot;
use super::series::{running_integral, TimeSeries};
use super::spec::{CriterionSpec, TheoremId};

/// `sup_{λ>0} (2λS − 2νQ)/(y Σ cᵢ λ^{qᵢ})`; zero when the flow cannot grow
/// at any amplitude, infinite when it can but every `cᵢ` vanishes.
pub fn amplitude_sup_rate(s: f64, nu: f64, q: f64, y: f64, terms: &[(f64, f64)]) -> f64 {
    if s <= 0.0 || y == 0.0 {
        return 0.0;
    }
    let live: Vec<(f64, f64)> = terms.iter().copied().filter(|t| t.0 > 0.0).collect();
    if live.is_empty() {
        return f64::INFINITY;
    }
    if nu * q == 0.0 {
        // Pure growth: the supremum is at λ → 0 for powers above one.
        return f64::INFINITY;
    }
    if let [(c, p)] = live[..] {
        // Stationary point λ* = pνQ/((p−1)S).
        let lam = p * nu * q / ((p - 1.0) * s);
        return 2.0 * nu * q / ((p - 1.0) * c * y * lam.powf(p));
    }
    let g = |lam: f64| {
        (2.0 * lam * s - 2.0 * nu * q) / (y * live.iter().map(|(c, p)| c * lam.powf(*p)).sum::<f64>())
    };
    // g is positive beyond λ₀ = νQ/S and decays at infinity; scan in log λ
    // and refine the best bracket by golden section.
    let lam0 = nu * q / s;
    let (lo, hi) = (lam0.ln(), (lam0 * 1e8).ln());
    let n = 400;
    let x = |i: usize| lo + (hi - lo) * i as f64 / n as f64;
    let best = (1..n)
        .max_by(|&a, &b| g(x(a).exp()).total_cmp(&g(x(b).exp())))
        .unwrap();
    let (mut a, mut b) = (x(best - 1), x(best + 1));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if g(c.exp()) > g(d.exp()) {
            b = d;
        } else {
            a = c;
        }
    }
    g((0.5 * (a + b)).exp()).max(g(x(best).exp()))
}

/// Rate constant of `snap` for `spec` at viscosity `nu`.
pub fn rate_constant(snap: &Snapshot, spec: &CriterionSpec, nu: f64) -> f64 {
    let terms: Vec<(f64, f64)> = spec
        .terms()
        .iter()
        .map(|t| (snap.term_value(t).powf(t.power), t.power))
        .collect();
    amplitude_sup_rate(
        snap.stretching,
        nu,
        snap.hessian_energy,
        snap.gradient_energy,
        &terms,
    )
}

/// `B(tᵢ) = v₀ exp(C Σ_terms ∫₀^{tᵢ} valueᵢ^{qᵢ})`, one series per criterion
/// term (all sharing the same times).
pub fn gronwall_bound(v0: f64, terms: &[(TimeSeries, f64)], c: f64) -> Result<TimeSeries> {
    if !(c >= 0.0) || !(v0 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Gronwall bound needs C >= 0 and v0 >= 0, got C = {c}, v0 = {v0}"
        )));
    }
    let Some((first, _)) = terms.first() else {
        return Err(Error::EmptySeries);
    };
    let mut total = vec![0.0; first.len()];
    for (series, q) in terms {
        if series.times() != first.times() {
            return Err(Error::InvalidParameter("term series differ in sample times".into()));
        }
        for (acc, v) in total.iter_mut().zip(running_integral(series, *q)?) {
            *acc += v;
        }
    }
    let values = total.iter().map(|i| v0 * (c * i).exp()).collect();
    TimeSeries::new(first.times().to_vec(), values)
}

/// `‖u₃‖_{L^q}` on the grid.
pub fn u3_lebesgue(state: &FlowState, q: f64) -> f64 {
    let g = state.grid();
    let u3 = state.u.component(2).inverse_unchecked();
    lp_norm_samples(u3.samples(), g.cell_volume(), q)
}

/// Initial value of each proof's Gronwall display: `‖∇u₀‖²` plus the
/// theorem's additive initial terms, with unit weights.
pub fn initial_value(spec: &CriterionSpec, state: &FlowState, snap: &Snapshot) -> f64 {
    let y0 = snap.gradient_energy;
    let h = snap.horizontal_gradient_l2.powf(8.0 / 3.0);
    match spec.theorem {
        TheoremId::T12 => y0,
        TheoremId::T13i | TheoremId::C14a => y0 + h,
        TheoremId::T13ii | TheoremId::C14b => y0 + h + 1.0,
        TheoremId::T14 => {
            let q = spec.exponent_pair().unwrap().q_leb;
            y0 + u3_lebesgue(state, q).powf(2.0 * q / (q - 3.0))
        }
        TheoremId::T15 => {
            let e = spec.exponent_pair().unwrap();
            let p = 24.0 * e.beta / (9.0 * e.beta - 25.0);
            y0 + u3_lebesgue(state, e.q_leb).powf(p) + h
        }
    }
}

/// `‖f‖_{Ḃ^{σ}_{∞,∞}}` of a single scalar field.
pub(crate) fn sup_besov(f: &crate::field::SpectralField, sigma: f64) -> f64 {
    let range = BlockRange::for_grid(f.grid());
    combine_blocks(
        block_norms(f, f64::INFINITY, &build_profile(), range).iter(),
        sigma,
        f64::INFINITY,
    )
}
