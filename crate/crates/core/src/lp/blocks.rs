use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_complex::Complex64;

use super::profile::{DyadicProfile, ANNULUS_INNER, ANNULUS_OUTER};
use crate::fft;
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::norms::lp_norm_samples;

/// Dyadic indices resolvable on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRange {
    pub j_min: i32,
    pub j_max: i32,
}

impl BlockRange {
    /// `j_min`: first annulus `[3/4·2^j, 8/3·2^j]` reaching `|k| = 1`;
    /// `j_max`: last annulus whose inner edge lies below the largest
    /// lattice radius `√3·n/2`.
    pub fn for_grid(grid: Grid) -> Self {
        let mut j_min = 0;
        while ANNULUS_OUTER * 2f64.powi(j_min - 1) >= 1.0 {
            j_min -= 1;
        }
        while ANNULUS_OUTER * 2f64.powi(j_min) < 1.0 {
            j_min += 1;
        }
        let kmax = grid.max_wavenumber_magnitude();
        let mut j_max = j_min;
        while ANNULUS_INNER * 2f64.powi(j_max + 1) <= kmax {
            j_max += 1;
        }
        Self { j_min, j_max }
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn len(&self) -> usize {
        if self.j_max < self.j_min {
            0
        } else {
            (self.j_max - self.j_min + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, j: i32) -> bool {
        (self.j_min..=self.j_max).contains(&j)
    }

    /// Highest block whose multiplier is nonzero on some lattice point.
    /// Its support is cut by the grid, so energy there is truncated.
    pub fn top_block(grid: Grid) -> i32 {
        let kmax = grid.max_wavenumber_magnitude();
        let mut j = Self::for_grid(grid).j_min;
        while 2f64.powi(j + 1) < kmax {
            j += 1;
        }
        j
    }
}

pub(crate) fn radii(grid: Grid) -> Vec<f64> {
    (0..grid.len())
        .map(|idx| {
            let k = grid.wavevector(idx);
            ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt()
        })
        .collect()
}

thread_local! {
    static MULTIPLIERS: RefCell<HashMap<(usize, i32), Rc<[f64]>>> = RefCell::new(HashMap::new());
}

/// `φ(2^{-j}|k|)` on the whole lattice, cached per grid and block (the
/// profile is a fixed function, so the cache never goes stale).
fn block_multiplier_table(grid: Grid, j: i32, profile: &DyadicProfile) -> Rc<[f64]> {
    MULTIPLIERS.with(|cache| {
        cache
            .borrow_mut()
            .entry((grid.n(), j))
            .or_insert_with(|| {
                let mut m: Vec<f64> = radii(grid)
                    .into_iter()
                    .map(|r| profile.block_multiplier(j, r))
                    .collect();
                m[0] = 0.0;
                m.into()
            })
            .clone()
    })
}

fn apply_table(f: &SpectralField, m: &[f64]) -> Vec<Complex64> {
    f.coeffs().iter().zip(m).map(|(c, &w)| c * w).collect()
}

fn apply_radial(f: &SpectralField, radii: &[f64], m: impl Fn(f64) -> f64) -> Vec<Complex64> {
    f.coeffs()
        .iter()
        .zip(radii)
        .map(|(c, &r)| if *c == Complex64::default() { *c } else { c * m(r) })
        .collect()
}

/// `Δ̇_j f`: multiply by `φ(2^{-j}|k|)`; the `k = 0` mode is always zero.
pub fn dyadic_block(f: &SpectralField, j: i32, profile: &DyadicProfile) -> SpectralField {
    let g = f.grid();
    let out = apply_table(f, &block_multiplier_table(g, j, profile));
    SpectralField::from_vec_unchecked(g, out)
}

/// `Ṡ_j f`: multiply by `χ(2^{-j}|k|)`.
pub fn low_pass(f: &SpectralField, j: i32, profile: &DyadicProfile) -> SpectralField {
    let g = f.grid();
    let out = apply_radial(f, &radii(g), |r| profile.low_pass_multiplier(j, r));
    SpectralField::from_vec_unchecked(g, out)
}

/// `‖Δ̇_j f‖_{L^p}` for every `j` in a range.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockNorms {
    pub range: BlockRange,
    pub p: f64,
    pub norms: Vec<f64>,
    /// Power `Σ|c|²` of each block.
    pub powers: Vec<f64>,
    pub mean_ignored: bool,
}

impl BlockNorms {
    pub fn get(&self, j: i32) -> f64 {
        if self.range.contains(j) {
            self.norms[(j - self.range.j_min) as usize]
        } else {
            0.0
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.range.iter().zip(self.norms.iter().copied())
    }

    /// Fraction of the total block power carried by block `j`.
    pub fn power_share(&self, j: i32) -> f64 {
        let total: f64 = self.powers.iter().sum();
        if total == 0.0 || !self.range.contains(j) {
            return 0.0;
        }
        self.powers[(j - self.range.j_min) as usize] / total
    }

    pub fn scale(&self, s: f64) -> BlockNorms {
        BlockNorms {
            norms: self.norms.iter().map(|v| v * s.abs()).collect(),
            powers: self.powers.iter().map(|v| v * s * s).collect(),
            ..self.clone()
        }
    }
}

/// Relative size of a mean below which it counts as zero.
const MEAN_TOLERANCE: f64 = 1e-13;

pub fn block_norms(
    f: &SpectralField,
    p: f64,
    profile: &DyadicProfile,
    range: BlockRange,
) -> BlockNorms {
    let g = f.grid();
    let scale = f.max_abs();
    let mean_ignored = scale > 0.0 && f.mean().norm() > MEAN_TOLERANCE * scale;

    let blocks: Vec<Vec<Complex64>> = range
        .iter()
        .map(|j| apply_table(f, &block_multiplier_table(g, j, profile)))
        .collect();
    let powers: Vec<f64> = blocks
        .iter()
        .map(|b| b.iter().map(|c| c.norm_sqr()).sum())
        .collect();

    let mut norms = vec![0.0; blocks.len()];
    let cell = g.cell_volume();
    if p == 2.0 {
        for (n, pw) in norms.iter_mut().zip(&powers) {
            *n = (g.volume() * pw).sqrt();
        }
    } else {
        let live: Vec<usize> = (0..blocks.len()).filter(|&i| powers[i] > 0.0).collect();
        for pair in live.chunks(2) {
            match pair {
                [a, b] => {
                    let (x, y) = fft::inverse_real_pair(g, &blocks[*a], &blocks[*b]);
                    norms[*a] = lp_norm_samples(&x, cell, p);
                    norms[*b] = lp_norm_samples(&y, cell, p);
                }
                [a] => {
                    let x = fft::inverse_real(g, &blocks[*a]);
                    norms[*a] = lp_norm_samples(&x, cell, p);
                }
                _ => unreachable!(),
            }
        }
    }
    BlockNorms {
        range,
        p,
        norms,
        powers,
        mean_ignored,
    }
}

/// Block norms of the pointwise Euclidean magnitude of a vector of fields.
pub fn magnitude_block_norms(
    fields: &[&SpectralField],
    p: f64,
    profile: &DyadicProfile,
    range: BlockRange,
) -> BlockNorms {
    assert!(!fields.is_empty());
    let g = fields[0].grid();
    let mean_ignored = fields.iter().any(|f| {
        let scale = f.max_abs();
        scale > 0.0 && f.mean().norm() > MEAN_TOLERANCE * scale
    });
    let cell = g.cell_volume();
    let mut norms = Vec::with_capacity(range.len());
    let mut powers = Vec::with_capacity(range.len());
    for j in range.iter() {
        let table = block_multiplier_table(g, j, profile);
        let blocks: Vec<Vec<Complex64>> = fields.iter().map(|f| apply_table(f, &table)).collect();
        let power: f64 = blocks
            .iter()
            .flat_map(|b| b.iter())
            .map(|c| c.norm_sqr())
            .sum();
        powers.push(power);
        if power == 0.0 {
            norms.push(0.0);
            continue;
        }
        if p == 2.0 {
            norms.push((g.volume() * power).sqrt());
            continue;
        }
        let refs: Vec<&[Complex64]> = blocks.iter().map(|b| b.as_slice()).collect();
        let samples = fft::inverse_real_many(g, &refs);
        let mag: Vec<f64> = (0..g.len())
            .map(|i| samples.iter().map(|s| s[i] * s[i]).sum::<f64>().sqrt())
            .collect();
        norms.push(lp_norm_samples(&mag, cell, p));
    }
    BlockNorms {
        range,
        p,
        norms,
        powers,
        mean_ignored,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{random_scalar, RandomSpec};
    use crate::field::RealField;
    use crate::lp::build_profile;

    #[test]
    fn range_for_grids() {
        let r = BlockRange::for_grid(Grid::new(32).unwrap());
        assert_eq!(r.j_min, -1);
        // 3/4 · 2^5 = 24 ≤ √3·16 ≈ 27.7 < 48.
        assert_eq!(r.j_max, 5);
        let r16 = BlockRange::for_grid(Grid::new(16).unwrap());
        assert_eq!((r16.j_min, r16.j_max), (-1, 4));
        assert_eq!(BlockRange::top_block(Grid::new(32).unwrap()), 4);
        assert_eq!(BlockRange::top_block(Grid::new(16).unwrap()), 3);
    }

    #[test]
    fn plateau_mode_lives_in_block_zero() {
        let g = Grid::new(16).unwrap();
        let p = build_profile();
        let f = RealField::from_fn(g, |x, y, _| (x + y).cos())
            .forward_transform()
            .unwrap();
        // Off-mode coefficients are transform round-off only.
        assert!(dyadic_block(&f, 0, &p).max_diff(&f) < 1e-16);
        for j in [-2, -1, 1, 2, 3] {
            assert!(dyadic_block(&f, j, &p).max_abs() < 1e-16);
        }
        assert!(low_pass(&f, 1, &p).max_diff(&f) < 1e-16);
    }

    #[test]
    fn distant_blocks_are_orthogonal() {
        let g = Grid::new(32).unwrap();
        let p = build_profile();
        let f = random_scalar(g, &RandomSpec::seeded(4).with_slope(0.0));
        let range = BlockRange::for_grid(g);
        for j in range.iter() {
            let bj = dyadic_block(&f, j, &p);
            for m in range.iter() {
                if (j - m).abs() >= 2 {
                    assert_eq!(dyadic_block(&bj, m, &p).max_abs(), 0.0);
                }
            }
        }
    }

    #[test]
    fn block_norms_match_direct_blocks() {
        let g = Grid::new(16).unwrap();
        let p = build_profile();
        let f = random_scalar(g, &RandomSpec::seeded(8));
        let range = BlockRange::for_grid(g);
        let bn = block_norms(&f, f64::INFINITY, &p, range);
        for (j, v) in bn.iter() {
            let direct = dyadic_block(&f, j, &p).inverse_transform().unwrap().max_abs();
            assert!((v - direct).abs() <= 1e-14 * direct.max(1.0));
        }
        assert!(!bn.mean_ignored);
        let single = magnitude_block_norms(&[&f], f64::INFINITY, &p, range);
        for (a, b) in single.norms.iter().zip(&bn.norms) {
            assert!((a - b).abs() <= 1e-14 * b.max(1.0));
        }
    }
}
