//! Measured ratios for the Bernstein and interpolation inequalities.
//! Constants are never asserted here; callers calibrate them.

use super::besov::{combine_blocks, sobolev_seminorm, BesovIndex};
use super::blocks::{block_norms, BlockRange};
use super::profile::DyadicProfile;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::norms::lp_norm;
use crate::ops;
use crate::ratio::Ratio;

#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinReport {
    /// `sup_{|α|=k} ‖∂^α f‖_q / (λ^{k+3(1/p−1/q)} ‖f‖_p)`.
    pub upper: Ratio,
    /// `λ^k ‖f‖_p / sup_{|α|=k} ‖∂^α f‖_p`; only for `p = q`.
    pub lower: Option<Ratio>,
    /// `‖|∇f|‖_q / (λ^{1+3(1/p−1/q)} ‖f‖_p)`, the Euclidean gradient form.
    pub gradient: Ratio,
}

fn multi_indices(order: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=order {
        for b in 0..=order - a {
            out.push([a, b, order - a - b]);
        }
    }
    out
}

fn derivative(f: &SpectralField, alpha: [u32; 3]) -> SpectralField {
    let mut d = f.clone();
    for (axis, &n) in alpha.iter().enumerate() {
        for _ in 0..n {
            d = ops::partial_derivative(&d, axis);
        }
    }
    d
}

fn inv_exponent(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

/// Bernstein ratios for a field localized at scale `λ = 2^j`.
pub fn check_bernstein(
    f_band: &SpectralField,
    j: i32,
    k_order: u32,
    p: f64,
    q: f64,
) -> Result<BernsteinReport> {
    if q < p {
        return Err(Error::InvalidParameter(format!(
            "Bernstein needs q ≥ p, got p = {p}, q = {q}"
        )));
    }
    let lambda = 2f64.powi(j);
    let fp = lp_norm(&f_band.inverse_transform()?, p)?;
    let sup_alpha = |r: f64| -> Result<f64> {
        let mut m = 0.0f64;
        for alpha in multi_indices(k_order) {
            m = m.max(lp_norm(&derivative(f_band, alpha).inverse_transform()?, r)?);
        }
        Ok(m)
    };
    let shift = 3.0 * (inv_exponent(p) - inv_exponent(q));
    let upper = Ratio::new(sup_alpha(q)?, lambda.powf(k_order as f64 + shift) * fp);
    let lower = if p == q {
        Some(Ratio::new(lambda.powi(k_order as i32) * fp, sup_alpha(p)?))
    } else {
        None
    };
    let grad = ops::gradient(f_band).inverse_transform()?;
    let gradient = Ratio::new(lp_norm(&grad.magnitude(), q)?, lambda.powf(1.0 + shift) * fp);
    Ok(BernsteinReport {
        upper,
        lower,
        gradient,
    })
}

/// Exponents of `‖f‖_{L^p} ≤ C ‖f‖^{1−θ}_{Ḃ^{−α}_{∞,∞}} ‖f‖^θ_{Ḃ^β_{q,q}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationSpec {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub theta: f64,
}

impl InterpolationSpec {
    /// `β = α(p/q − 1)`, `θ = q/p`.
    pub fn new(alpha: f64, p: f64, q: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        if !(1.0 <= q && q < p && p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "interpolation needs 1 ≤ q < p < ∞, got p = {p}, q = {q}"
            )));
        }
        Ok(Self {
            alpha,
            beta: alpha * (p / q - 1.0),
            p,
            q,
            theta: q / p,
        })
    }

    /// `‖f‖_{L⁴} ≲ ‖f‖^{1/2}_{Ḃ^{−1}_{∞,∞}} ‖∇f‖^{1/2}_{L²}`.
    pub fn a3() -> Self {
        Self::new(1.0, 4.0, 2.0).unwrap()
    }

    /// `‖f‖_{L⁶} ≲ ‖f‖^{2/3}_{Ḃ^{−1/2}_{∞,∞}} ‖∇f‖^{1/3}_{L²}`.
    pub fn a4_l6() -> Self {
        Self::new(0.5, 6.0, 2.0).unwrap()
    }

    /// `‖f‖_{L³} ≲ ‖f‖^{1/3}_{Ḃ^{−2}_{∞,∞}} ‖∇f‖^{2/3}_{L²}`.
    pub fn a4_l3() -> Self {
        Self::new(2.0, 3.0, 2.0).unwrap()
    }
}

/// Right-hand side factor `‖f‖_{Ḃ^β_{q,q}}`; `q = 2` is evaluated as `Ḣ^β`.
fn upper_factor(
    f: &SpectralField,
    spec: &InterpolationSpec,
    profile: &DyadicProfile,
    range: BlockRange,
) -> f64 {
    if spec.q == 2.0 {
        sobolev_seminorm(f, spec.beta)
    } else {
        let bn = block_norms(f, spec.q, profile, range);
        combine_blocks(bn.iter(), spec.beta, spec.q)
    }
}

pub fn interpolation_ratio(
    f: &SpectralField,
    spec: &InterpolationSpec,
    profile: &DyadicProfile,
    range: BlockRange,
) -> Result<Ratio> {
    let lhs = lp_norm(&f.without_mean().inverse_transform()?, spec.p)?;
    let low = combine_blocks(
        block_norms(f, f64::INFINITY, profile, range).iter(),
        -spec.alpha,
        f64::INFINITY,
    );
    let high = upper_factor(f, spec, profile, range);
    Ok(Ratio::new(
        lhs,
        low.powf(1.0 - spec.theta) * high.powf(spec.theta),
    ))
}

/// `‖f‖_{Ḃ^{θs₁+(1−θ)s₂}_{p,r}} / (‖f‖^θ_{Ḃ^{s₁}_{p,r}} ‖f‖^{1−θ}_{Ḃ^{s₂}_{p,r}})`.
pub fn besov_interpolation_ratio(
    f: &SpectralField,
    s1: f64,
    s2: f64,
    theta: f64,
    p: f64,
    r: f64,
    profile: &DyadicProfile,
    range: BlockRange,
) -> Result<Ratio> {
    if s1 >= s2 {
        return Err(Error::InvalidParameter(format!("need s1 < s2, got {s1}, {s2}")));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0,1), got {theta}")));
    }
    BesovIndex::new(s1, p, r)?;
    let bn = block_norms(f, p, profile, range);
    let mid = combine_blocks(bn.iter(), theta * s1 + (1.0 - theta) * s2, r);
    let a = combine_blocks(bn.iter(), s1, r);
    let b = combine_blocks(bn.iter(), s2, r);
    Ok(Ratio::new(mid, a.powf(theta) * b.powf(1.0 - theta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{dilate_by_two, random_scalar, RandomSpec};
    use crate::field::RealField;
    use crate::grid::Grid;
    use crate::lp::{build_profile, dyadic_block};

    fn cos_sum(g: Grid) -> SpectralField {
        RealField::from_fn(g, |x, y, _| (x + y).cos())
            .forward_transform()
            .unwrap()
    }

    #[test]
    fn pure_mode_gradient_ratio() {
        let g = Grid::new(16).unwrap();
        let rep = check_bernstein(&cos_sum(g), 0, 1, f64::INFINITY, f64::INFINITY).unwrap();
        let k = 2f64.sqrt();
        assert!((rep.gradient.value.unwrap() / k - 1.0).abs() < 1e-12);
        assert!((rep.upper.value.unwrap() - 1.0).abs() < 1e-12);
        assert!((rep.lower.unwrap().value.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field_skips_and_bad_order_rejected() {
        let g = Grid::new(8).unwrap();
        let z = SpectralField::zeros(g);
        let rep = check_bernstein(&z, 0, 1, 2.0, 4.0).unwrap();
        assert!(rep.upper.skipped() && rep.gradient.skipped());
        assert!(check_bernstein(&z, 0, 1, 4.0, 2.0).is_err());
    }

    #[test]
    fn presets_match_lemma_exponents() {
        for s in [InterpolationSpec::a3(), InterpolationSpec::a4_l6(), InterpolationSpec::a4_l3()] {
            assert!((s.beta - 1.0).abs() < 1e-15);
            assert_eq!(s.q, 2.0);
        }
        assert_eq!(InterpolationSpec::a3().theta, 0.5);
        assert!(InterpolationSpec::new(1.0, 2.0, 4.0).is_err());
    }

    #[test]
    fn interpolation_is_dilation_invariant() {
        // The dilate's sup norms are sampled on every other grid point;
        // n = 64 keeps that sampling error well under 1%.
        let g = Grid::new(64).unwrap();
        let p = build_profile();
        let range = BlockRange::for_grid(g);
        let f = random_scalar(g, &RandomSpec::seeded(5).with_max_wavenumber(5));
        let d = dilate_by_two(&f).unwrap();
        for spec in [InterpolationSpec::a3(), InterpolationSpec::a4_l6(), InterpolationSpec::a4_l3()] {
            let a = interpolation_ratio(&f, &spec, &p, range).unwrap().value.unwrap();
            let b = interpolation_ratio(&d, &spec, &p, range).unwrap().value.unwrap();
            assert!((a / b - 1.0).abs() < 0.01, "{spec:?}: {a} vs {b}");
        }
    }

    #[test]
    fn sup_interpolation_holds_with_unit_constant() {
        let g = Grid::new(16).unwrap();
        let p = build_profile();
        let range = BlockRange::for_grid(g);
        for seed in 0..5 {
            let f = random_scalar(g, &RandomSpec::seeded(seed));
            let r = besov_interpolation_ratio(&f, -1.0, 0.5, 0.3, f64::INFINITY, f64::INFINITY, &p, range)
                .unwrap();
            assert!(r.value.unwrap() <= 1.0 + 1e-10);
        }
        let block = dyadic_block(&cos_sum(g), 0, &p);
        let r = besov_interpolation_ratio(&block, -1.0, 0.0, 0.5, f64::INFINITY, f64::INFINITY, &p, range)
            .unwrap();
        assert!((r.value.unwrap() - 1.0).abs() < 1e-12);
    }
}
