//! Homogeneous Besov norms over a finite block range, and the Sobolev
//! seminorm `Ḣ^s` computed directly from coefficients.

use super::blocks::{block_norms, magnitude_block_norms, BlockNorms, BlockRange};
use super::profile::DyadicProfile;
use crate::error::{Error, Result};
use crate::field::SpectralField;

/// Share of block power in the grid-truncated top block above which a
/// norm is flagged as under-reported.
pub const TOP_BLOCK_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        for e in [p, q] {
            if e.is_nan() || e < 1.0 {
                return Err(Error::InvalidExponent(e));
            }
        }
        if !s.is_finite() {
            return Err(Error::InvalidParameter(format!("regularity index {s}")));
        }
        Ok(Self { s, p, q })
    }

    /// `Ḃ^s_{∞,∞}`.
    pub fn sup(s: f64) -> Self {
        Self {
            s,
            p: f64::INFINITY,
            q: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesovWarning {
    /// The input had a nonzero mean; it was dropped.
    MeanIgnored,
    /// The block range was empty; the value is zero.
    EmptyRange,
    /// More than [`TOP_BLOCK_THRESHOLD`] of the power sits in the top block.
    TopBlockShare,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BesovNorm {
    pub value: f64,
    pub range: BlockRange,
    pub top_block_share: f64,
    pub warnings: Vec<BesovWarning>,
}

/// How a vector of fields is reduced to one norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VectorConvention {
    /// Maximum of the scalar norms of the components.
    #[default]
    ComponentMax,
    /// Blockwise `L^p` norm of the pointwise Euclidean magnitude.
    Magnitude,
}

/// `(Σ_j (2^{js} a_j)^q)^{1/q}`, or the supremum when `q = ∞`.
pub fn combine_blocks(blocks: impl Iterator<Item = (i32, f64)>, s: f64, q: f64) -> f64 {
    let weighted = blocks.map(|(j, a)| if a == 0.0 { 0.0 } else { 2f64.powf(j as f64 * s) * a });
    if q.is_infinite() {
        weighted.fold(0.0, f64::max)
    } else {
        let w: Vec<f64> = weighted.collect();
        let m = w.iter().fold(0.0f64, |m, v| m.max(*v));
        if m == 0.0 {
            return 0.0;
        }
        m * w.iter().map(|v| (v / m).powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

fn finish(bn: &BlockNorms, idx: BesovIndex, top: i32) -> BesovNorm {
    let mut warnings = Vec::new();
    if bn.mean_ignored {
        warnings.push(BesovWarning::MeanIgnored);
    }
    if bn.range.is_empty() {
        warnings.push(BesovWarning::EmptyRange);
    }
    let top_block_share = bn.power_share(top);
    if top_block_share > TOP_BLOCK_THRESHOLD {
        warnings.push(BesovWarning::TopBlockShare);
    }
    BesovNorm {
        value: combine_blocks(bn.iter(), idx.s, idx.q),
        range: bn.range,
        top_block_share,
        warnings,
    }
}

pub fn besov_norm(
    f: &SpectralField,
    idx: BesovIndex,
    profile: &DyadicProfile,
    range: BlockRange,
) -> BesovNorm {
    let bn = block_norms(f, idx.p, profile, range);
    finish(&bn, idx, BlockRange::top_block(f.grid()))
}

/// Besov norm of a vector of scalar fields under `convention`.
pub fn besov_norm_vector(
    fields: &[&SpectralField],
    idx: BesovIndex,
    convention: VectorConvention,
    profile: &DyadicProfile,
    range: BlockRange,
) -> BesovNorm {
    let Some(first) = fields.first() else {
        return BesovNorm {
            value: 0.0,
            range,
            top_block_share: 0.0,
            warnings: vec![BesovWarning::EmptyRange],
        };
    };
    let top = BlockRange::top_block(first.grid());
    match convention {
        VectorConvention::Magnitude => {
            finish(&magnitude_block_norms(fields, idx.p, profile, range), idx, top)
        }
        VectorConvention::ComponentMax => {
            let parts: Vec<BesovNorm> = fields
                .iter()
                .map(|f| besov_norm(f, idx, profile, range))
                .collect();
            let mut out = parts[0].clone();
            for p in &parts[1..] {
                out.value = out.value.max(p.value);
                out.top_block_share = out.top_block_share.max(p.top_block_share);
                for w in &p.warnings {
                    if !out.warnings.contains(w) {
                        out.warnings.push(*w);
                    }
                }
            }
            out
        }
    }
}

/// `‖f‖_{Ḣ^s} = ((2π)³ Σ_{k≠0} |k|^{2s} |c(k)|²)^{1/2}`.
pub fn sobolev_seminorm(f: &SpectralField, s: f64) -> f64 {
    let g = f.grid();
    let sum: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .map(|(idx, c)| {
            let k = g.wavevector(idx);
            let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            kk.powf(s) * c.norm_sqr()
        })
        .sum();
    (g.volume() * sum).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{random_scalar, RandomSpec};
    use crate::field::RealField;
    use crate::grid::Grid;
    use crate::lp::build_profile;
    use crate::norms::l2_norm_spectral;
    use crate::ops;

    fn cos_sum(g: Grid) -> SpectralField {
        RealField::from_fn(g, |x, y, _| (x + y).cos())
            .forward_transform()
            .unwrap()
    }

    #[test]
    fn single_block_sup_norm_is_one() {
        let g = Grid::new(16).unwrap();
        let p = build_profile();
        let f = cos_sum(g);
        for s in [-1.0, 0.0, 1.0, 0.37] {
            let b = besov_norm(&f, BesovIndex::sup(s), &p, BlockRange::for_grid(g));
            assert!((b.value - 1.0).abs() < 1e-12);
            assert!(b.warnings.is_empty());
        }
    }

    #[test]
    fn gradient_magnitude_of_single_mode() {
        let g = Grid::new(16).unwrap();
        let p = build_profile();
        let grad = ops::gradient(&cos_sum(g));
        let comps: Vec<&SpectralField> = grad.components().iter().collect();
        let range = BlockRange::for_grid(g);
        let mag = besov_norm_vector(&comps, BesovIndex::sup(-1.0), VectorConvention::Magnitude, &p, range);
        assert!((mag.value - 2f64.sqrt()).abs() < 1e-12);
        let max = besov_norm_vector(&comps, BesovIndex::sup(-1.0), VectorConvention::ComponentMax, &p, range);
        assert!((max.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sobolev_endpoints() {
        let g = Grid::new(16).unwrap();
        let f = random_scalar(g, &RandomSpec::seeded(3));
        assert!((sobolev_seminorm(&f, 0.0) - l2_norm_spectral(&f)).abs() < 1e-12);
        let grad = ops::gradient(&f);
        let expected = crate::norms::l2_norm_vector(&grad);
        assert!((sobolev_seminorm(&f, 1.0) - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn besov_22_is_close_to_sobolev() {
        let g = Grid::new(16).unwrap();
        let p = build_profile();
        let range = BlockRange::for_grid(g);
        for seed in 0..10 {
            let f = random_scalar(g, &RandomSpec::seeded(seed));
            for s in [-1.0, 0.0, 0.5, 1.0] {
                let b = besov_norm(&f, BesovIndex::new(s, 2.0, 2.0).unwrap(), &p, range).value;
                let r = b / sobolev_seminorm(&f, s);
                assert!((0.5..=2.0).contains(&r), "seed {seed} s {s} ratio {r}");
            }
        }
    }

    #[test]
    fn mean_and_empty_range_are_flagged() {
        let g = Grid::new(8).unwrap();
        let p = build_profile();
        let f = RealField::from_fn(g, |x, _, _| 1.0 + x.cos()).forward_transform().unwrap();
        let b = besov_norm(&f, BesovIndex::sup(0.0), &p, BlockRange::for_grid(g));
        assert!(b.warnings.contains(&BesovWarning::MeanIgnored));
        let empty = BlockRange { j_min: 3, j_max: 2 };
        let b = besov_norm(&f, BesovIndex::sup(0.0), &p, empty);
        assert_eq!(b.value, 0.0);
        assert!(b.warnings.contains(&BesovWarning::EmptyRange));
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(BesovIndex::new(0.0, 0.5, 2.0).is_err());
        assert!(BesovIndex::new(0.0, 2.0, f64::NAN).is_err());
        assert!(BesovIndex::new(f64::NAN, 2.0, 2.0).is_err());
    }
}
