use crate::error::{Error, Result};
use crate::grid::Grid;

use super::state::FlowState;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    TaylorGreen,
    /// Seeded Gaussian field shaped by `|k|^slope`, rms speed `amplitude`.
    Random { slope: f64, amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub n: usize,
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub init: InitialCondition,
    /// Steps between recorded samples; the final state is always recorded.
    pub sample_stride: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 32,
            nu: 0.1,
            dt: 1e-3,
            t_end: 1.0,
            dealias: true,
            init: InitialCondition::TaylorGreen,
            sample_stride: 10,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<Grid> {
        let grid = Grid::new(self.n)?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        positive("nu", self.nu)?;
        positive("dt", self.dt)?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "end time must be nonnegative, got {}",
                self.t_end
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidParameter("sample stride must be at least 1".into()));
        }
        if let InitialCondition::Random { slope, amplitude } = self.init {
            if !slope.is_finite() || !(amplitude >= 0.0 && amplitude.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "random init needs finite slope and amplitude >= 0, got {slope}, {amplitude}"
                )));
            }
        }
        Ok(grid)
    }

    /// Number of steps to reach `t_end`; the last one may be shorter.
    pub fn step_count(&self) -> u64 {
        let raw = self.t_end / self.dt;
        let rounded = raw.round();
        if (raw - rounded).abs() <= 1e-9 * rounded.max(1.0) {
            rounded as u64
        } else {
            raw.ceil() as u64
        }
    }
}

/// Advective limit `0.5 · spacing / max|u|`. The viscous term is integrated
/// exactly, so it imposes no restriction.
pub fn stability_limit(state: &FlowState) -> f64 {
    let umax = state.max_speed();
    if umax == 0.0 {
        f64::INFINITY
    } else {
        0.5 * state.grid().spacing() / umax
    }
}

/// Warning text when `dt` exceeds the advective limit of `state`.
pub fn stability_warning(dt: f64, state: &FlowState) -> Option<String> {
    let limit = stability_limit(state);
    (dt > limit).then(|| {
        format!(
            "dt = {dt:e} exceeds the advective stability limit {limit:e} at t = {}",
            state.t
        )
    })
}
