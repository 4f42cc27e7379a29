use crate::error::{Error, Result};
use crate::field::SpectralVector;
use crate::grid::Grid;
use crate::norms::l2_norm_vector;
use crate::ops;

/// Relative divergence above which a state is rejected.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// Velocity in coefficient space at time `t`, after `step` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub step: u64,
    pub u: SpectralVector,
}

impl FlowState {
    /// Checks the divergence and mean-zero invariants.
    pub fn new(t: f64, u: SpectralVector) -> Result<Self> {
        let state = Self { t, step: 0, u };
        let rel = state.relative_divergence();
        if !(rel <= DIVERGENCE_TOLERANCE) {
            return Err(Error::InvalidParameter(format!(
                "velocity is not divergence-free (relative divergence {rel:e})"
            )));
        }
        for (i, c) in state.u.components().iter().enumerate() {
            if c.mean().norm() > 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "component {} has a nonzero mean",
                    i + 1
                )));
            }
        }
        Ok(state)
    }

    pub(crate) fn from_parts(t: f64, step: u64, u: SpectralVector) -> Self {
        Self { t, step, u }
    }

    pub fn grid(&self) -> Grid {
        self.u.grid()
    }

    /// `‖u‖²_{L²}`.
    pub fn energy(&self) -> f64 {
        self.grid().volume() * self.u.power()
    }

    /// `‖∇u‖²_{L²}`.
    pub fn gradient_energy(&self) -> f64 {
        let g = self.grid();
        let mut sum = 0.0;
        for c in self.u.components() {
            for (idx, z) in c.coeffs().iter().enumerate() {
                let n2 = z.norm_sqr();
                if n2 > 0.0 {
                    let k = g.wavevector(idx);
                    sum += (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64 * n2;
                }
            }
        }
        g.volume() * sum
    }

    pub fn vorticity(&self) -> SpectralVector {
        ops::curl(&self.u).expect("components share a grid")
    }

    /// `‖∇·u‖₂ / ‖∇u‖₂`, zero for a zero field.
    pub fn relative_divergence(&self) -> f64 {
        let div = ops::divergence(&self.u).expect("components share a grid");
        let num = (self.grid().volume() * div.power()).sqrt();
        if num == 0.0 {
            return 0.0;
        }
        num / self.gradient_energy().sqrt()
    }

    pub fn max_speed(&self) -> f64 {
        self.u.inverse_unchecked(self.grid()).magnitude().max_abs()
    }

    pub fn vorticity_l2(&self) -> f64 {
        l2_norm_vector(&self.vorticity())
    }
}
