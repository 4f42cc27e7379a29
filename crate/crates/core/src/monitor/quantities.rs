//! Per-sample scalars shared by every criterion: block sup-norms of the
//! twelve scalar fields `uᵢ`, `∂ⱼuᵢ`, plus the energy-type integrals.

use num_complex::Complex64;

use crate::fft;
use crate::field::{SpectralField, SpectralVector};
use crate::grid::Grid;
use crate::lp::{block_norms, build_profile, combine_blocks, BlockNorms, BlockRange};
use crate::ops;
use crate::solver::FlowState;

use super::spec::{CriterionSpec, Quantity, Term};

/// Spectral and real-space samples of `uᵢ` (index `i`) and `∂ⱼuᵢ`
/// (index `3 + 3i + j`).
pub(crate) struct Kinematics {
    pub grid: Grid,
    pub spectral: Vec<SpectralField>,
    pub real: Vec<Vec<f64>>,
}

impl Kinematics {
    pub fn new(u: &SpectralVector) -> Self {
        let grid = u.grid();
        let mut spectral: Vec<SpectralField> = u.components().to_vec();
        spectral.extend(ops::velocity_gradient(u).into_iter().flatten());
        let refs: Vec<&[Complex64]> = spectral.iter().map(|f| f.coeffs()).collect();
        let real = fft::inverse_real_many(grid, &refs);
        Self {
            grid,
            spectral,
            real,
        }
    }

    pub fn du(&self, i: usize, j: usize) -> &[f64] {
        &self.real[3 + 3 * i + j]
    }

    /// Pointwise `ω = ∇×u`.
    pub fn vorticity(&self) -> [Vec<f64>; 3] {
        let d = |i, j, x: usize| self.du(i, j)[x];
        let n = self.grid.len();
        [
            (0..n).map(|x| d(2, 1, x) - d(1, 2, x)).collect(),
            (0..n).map(|x| d(0, 2, x) - d(2, 0, x)).collect(),
            (0..n).map(|x| d(1, 0, x) - d(0, 1, x)).collect(),
        ]
    }

    /// Pointwise Frobenius norm over the gradient entries `∂ⱼuᵢ` with
    /// `j` in `cols`.
    pub fn gradient_magnitude(&self, cols: &[usize]) -> Vec<f64> {
        (0..self.grid.len())
            .map(|x| {
                let mut s = 0.0;
                for i in 0..3 {
                    for &j in cols {
                        let v = self.du(i, j)[x];
                        s += v * v;
                    }
                }
                s.sqrt()
            })
            .collect()
    }
}

/// `V Σ |k|^{2m} |c(k)|²` summed over the components of `u`.
pub(crate) fn weighted_power(u: &SpectralVector, m: i32) -> f64 {
    let g = u.grid();
    let mut sum = 0.0;
    for c in u.components() {
        for (idx, z) in c.coeffs().iter().enumerate() {
            let n2 = z.norm_sqr();
            if n2 > 0.0 {
                let k = g.wavevector(idx);
                sum += ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).powi(m) * n2;
            }
        }
    }
    g.volume() * sum
}

/// `∫ ω·(∇u)ω dx`, equal to `⟨Δu, (u·∇)u⟩` for divergence-free `u`.
pub(crate) fn stretching(k: &Kinematics) -> f64 {
    let w = k.vorticity();
    let mut sum = 0.0;
    for x in 0..k.grid.len() {
        for i in 0..3 {
            for j in 0..3 {
                sum += w[i][x] * k.du(i, j)[x] * w[j][x];
            }
        }
    }
    k.grid.cell_volume() * sum
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    range: BlockRange,
    top: i32,
    blocks: Vec<BlockNorms>,
    /// `‖u‖²_{L²}`.
    pub energy: f64,
    /// `y = ‖∇u‖²_{L²} = ‖ω‖²_{L²}`.
    pub gradient_energy: f64,
    /// `Q = ‖Δu‖²_{L²} = ‖∇ω‖²_{L²}`.
    pub hessian_energy: f64,
    /// `S = ∫ ω·(∇u)ω`; `dy/dt = 2S − 2νQ`.
    pub stretching: f64,
    /// `‖∇_h u‖_{L²}`.
    pub horizontal_gradient_l2: f64,
}

impl Snapshot {
    pub fn new(state: &FlowState) -> Self {
        Self::from_kinematics(state.t, &state.u, &Kinematics::new(&state.u))
    }

    pub(crate) fn from_kinematics(t: f64, u: &SpectralVector, k: &Kinematics) -> Self {
        let range = BlockRange::for_grid(k.grid);
        let profile = build_profile();
        let blocks = k
            .spectral
            .iter()
            .map(|f| block_norms(f, f64::INFINITY, &profile, range))
            .collect();
        let horizontal: f64 = Quantity::HorizontalGradient
            .fields()
            .iter()
            .map(|&i| k.spectral[i].power())
            .sum();
        Self {
            t,
            range,
            top: BlockRange::top_block(k.grid),
            blocks,
            energy: weighted_power(u, 0),
            gradient_energy: weighted_power(u, 1),
            hessian_energy: weighted_power(u, 2),
            stretching: stretching(k),
            horizontal_gradient_l2: (k.grid.volume() * horizontal).sqrt(),
        }
    }

    pub fn range(&self) -> BlockRange {
        self.range
    }

    /// Sup-norm blocks of scalar field `index` (see [`Quantity::fields`]).
    pub fn blocks(&self, index: usize) -> &BlockNorms {
        &self.blocks[index]
    }

    /// `max_i ‖fᵢ‖_{Ḃ^{σ}_{∞,∞}}` over the quantity's fields.
    pub fn besov(&self, quantity: Quantity, smoothness: f64) -> f64 {
        quantity
            .fields()
            .iter()
            .map(|&i| combine_blocks(self.blocks[i].iter(), smoothness, f64::INFINITY))
            .fold(0.0, f64::max)
    }

    /// Largest share of block power in the top resolved block.
    pub fn top_block_share(&self, quantity: Quantity) -> f64 {
        quantity
            .fields()
            .iter()
            .map(|&i| self.blocks[i].power_share(self.top))
            .fold(0.0, f64::max)
    }

    pub fn term_value(&self, term: &Term) -> f64 {
        self.besov(term.quantity, term.smoothness)
    }

    pub fn criterion_values(&self, spec: &CriterionSpec) -> Vec<f64> {
        spec.terms().iter().map(|t| self.term_value(t)).collect()
    }

    /// Gronwall rate `Σ valueᵢ^{qᵢ}`.
    pub fn rate(&self, spec: &CriterionSpec) -> f64 {
        spec.terms()
            .iter()
            .map(|t| self.term_value(t).powf(t.power))
            .sum()
    }
}

/// Value of the criterion's leading norm (for T1.4, `‖∂₃u₃‖_{Ḃ^{−s}_{∞,∞}}`;
/// see [`criterion_values`] for all three).
pub fn criterion_value(state: &FlowState, spec: &CriterionSpec) -> f64 {
    criterion_values(state, spec)[0]
}

pub fn criterion_values(state: &FlowState, spec: &CriterionSpec) -> Vec<f64> {
    Snapshot::new(state).criterion_values(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{random_divfree, RandomSpec};
    use crate::field::{RealField, Vector3};
    use crate::monitor::spec::TheoremId;
    use crate::solver::taylor_green_init;

    fn state(u: SpectralVector) -> FlowState {
        FlowState::new(0.0, u).unwrap()
    }

    fn from_real(g: Grid, f: [&dyn Fn(f64, f64, f64) -> f64; 3]) -> SpectralVector {
        Vector3::new(f.map(|h| {
            RealField::from_fn(g, h).forward_transform().unwrap().without_mean()
        }))
        .unwrap()
    }

    #[test]
    fn taylor_green_u3_quantities_vanish() {
        let s = Snapshot::new(&taylor_green_init(Grid::new(16).unwrap()));
        for t in [TheoremId::T13ii, TheoremId::T15, TheoremId::C14b] {
            let spec = CriterionSpec::default_for(t);
            assert_eq!(s.criterion_values(&spec)[0], 0.0);
        }
        let v = s.criterion_values(&CriterionSpec::default_for(TheoremId::T14));
        assert_eq!(v[0], 0.0);
        assert!(v[1] > 0.0 && v[2] > 0.0);
    }

    #[test]
    fn x3_independent_field_has_no_d3_terms() {
        let g = Grid::new(16).unwrap();
        let u = from_real(
            g,
            [
                &|_, y, _| y.sin(),
                &|x, _, _| (2.0 * x).cos(),
                &|x, y, _| (x + y).sin(),
            ],
        );
        let v = criterion_values(&state(u), &CriterionSpec::default_for(TheoremId::T14));
        assert_eq!(v, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn single_mode_d3u1_block_value() {
        // u = (sin(x₂+x₃), 0, 0): ∂₃u₁ = cos(x₂+x₃) sits at |k| = √2, inside
        // the plateau of block 0 (φ(√2) = 1), so ‖·‖_{Ḃ^{-1}} = 2⁰·1 = 1.
        let g = Grid::new(16).unwrap();
        let u = from_real(g, [&|_, y, z| (y + z).sin(), &|_, _, _| 0.0, &|_, _, _| 0.0]);
        let v = criterion_values(&state(u), &CriterionSpec::default_for(TheoremId::T14));
        assert!((v[1] - 1.0).abs() < 1e-12, "{}", v[1]);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn values_are_homogeneous() {
        let g = Grid::new(16).unwrap();
        let u = random_divfree(g, &RandomSpec::seeded(5));
        let a = Snapshot::new(&state(u.clone()));
        let b = Snapshot::new(&state(u.scale(2.0)));
        for spec in CriterionSpec::all_defaults() {
            for (x, y) in a.criterion_values(&spec).iter().zip(b.criterion_values(&spec)) {
                assert!((y - 2.0 * x).abs() <= 1e-12 * y.abs(), "{spec:?}");
            }
        }
    }

    #[test]
    fn energy_integrals_match_direct_evaluation() {
        let g = Grid::new(16).unwrap();
        let st = state(random_divfree(g, &RandomSpec::seeded(9)));
        let s = Snapshot::new(&st);
        assert!((s.gradient_energy - st.gradient_energy()).abs() < 1e-12 * s.gradient_energy);
        let w = st.vorticity_l2();
        assert!((w * w - s.gradient_energy).abs() < 1e-12 * s.gradient_energy);
        // S = ⟨Δu, (u·∇)u⟩.
        let conv = crate::solver::convective_term(&st.u, false);
        let lap = ops::vector_laplacian(&st.u);
        let direct = crate::norms::inner_product_vector(&lap, &conv);
        assert!((direct - s.stretching).abs() < 1e-10 * direct.abs().max(1.0));
    }
}
