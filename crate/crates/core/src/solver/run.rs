use crate::error::{Error, Result};
use crate::field::RealField;

use super::config::{stability_warning, SolverConfig};
use super::init::initial_state;
use super::integrator::Stepper;
use super::pressure::pressure_solve;
use super::state::FlowState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `‖u‖²_{L²}`.
    pub energy: f64,
    /// `‖∇u‖²_{L²}`.
    pub gradient_energy: f64,
    /// `‖ω‖_{L²}`.
    pub vorticity_l2: f64,
    pub relative_divergence: f64,
}

impl Diagnostics {
    pub fn of(state: &FlowState) -> Self {
        Self {
            energy: state.energy(),
            gradient_energy: state.gradient_energy(),
            vorticity_l2: state.vorticity_l2(),
            relative_divergence: state.relative_divergence(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub state: FlowState,
    pub diagnostics: Diagnostics,
}

impl TrajectorySample {
    pub fn new(state: FlowState) -> Self {
        let diagnostics = Diagnostics::of(&state);
        Self { state, diagnostics }
    }

    pub fn t(&self) -> f64 {
        self.state.t
    }

    /// Pressure, solved on demand.
    pub fn pressure(&self) -> RealField {
        pressure_solve(&self.state)
    }
}

/// `‖u(t)‖² + 2ν∫₀ᵗ‖∇u‖² = K₁` for the truncated system; the integral is a
/// trapezoid over every step, not only the recorded samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBudget {
    pub k1: f64,
    pub dissipation: f64,
    pub energy: f64,
}

impl EnergyBudget {
    pub fn defect(&self) -> f64 {
        self.energy + self.dissipation - self.k1
    }

    pub fn relative_defect(&self) -> f64 {
        if self.k1 == 0.0 {
            self.defect().abs()
        } else {
            self.defect().abs() / self.k1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub budget: EnergyBudget,
    pub steps: u64,
    pub samples: usize,
    /// Set when the run stopped early.
    pub aborted: Option<Error>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub summary: RunSummary,
}

pub fn run(config: &SolverConfig) -> Result<Trajectory> {
    let mut samples = Vec::new();
    let summary = run_observed(config, |s| samples.push(s))?;
    Ok(Trajectory { samples, summary })
}

/// Like [`run`], but hands each sample to `observe` instead of keeping it.
pub fn run_observed(
    config: &SolverConfig,
    observe: impl FnMut(TrajectorySample),
) -> Result<RunSummary> {
    let state = initial_state(config)?;
    run_from(config, state, observe)
}

/// Continue from `state` (e.g. a checkpoint) up to `config.t_end`.
pub fn run_from(
    config: &SolverConfig,
    mut state: FlowState,
    mut observe: impl FnMut(TrajectorySample),
) -> Result<RunSummary> {
    let grid = config.validate()?;
    grid.check_same(&state.grid())?;
    let total = config.step_count();
    let k1 = state.energy();
    let two_nu = 2.0 * config.nu;
    let mut warnings = Vec::new();
    let mut budget = EnergyBudget {
        k1,
        dissipation: 0.0,
        energy: k1,
    };
    let mut samples = 0usize;
    let mut rate = two_nu * state.gradient_energy();
    let stride = config.sample_stride as u64;

    let mut emit = |state: &FlowState, warnings: &mut Vec<String>| {
        if warnings.is_empty() {
            if let Some(w) = stability_warning(config.dt, state) {
                warnings.push(w);
            }
        }
        observe(TrajectorySample::new(state.clone()));
    };

    emit(&state, &mut warnings);
    samples += 1;
    let stepper = Stepper::new(grid, config.nu, config.dt, config.dealias);
    let last_dt = config.t_end - (total.saturating_sub(1)) as f64 * config.dt;
    let last = (total > 0 && (last_dt - config.dt).abs() > 1e-12 * config.dt)
        .then(|| Stepper::new(grid, config.nu, last_dt, config.dealias));

    let mut aborted = None;
    while state.step < total {
        let s = match (&last, state.step + 1 == total) {
            (Some(l), true) => l,
            _ => &stepper,
        };
        match s.step(&state, k1) {
            Ok(mut next) => {
                next.t = if next.step == total {
                    config.t_end
                } else {
                    next.step as f64 * config.dt
                };
                let next_rate = two_nu * next.gradient_energy();
                budget.dissipation += 0.5 * s.dt() * (rate + next_rate);
                rate = next_rate;
                state = next;
            }
            Err(e) => {
                aborted = Some(e);
                break;
            }
        }
        if state.step % stride == 0 || state.step == total {
            emit(&state, &mut warnings);
            samples += 1;
        }
    }
    budget.energy = state.energy();
    Ok(RunSummary {
        budget,
        steps: state.step,
        samples,
        aborted,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_end_time_gives_initial_sample() {
        let c = SolverConfig {
            n: 8,
            t_end: 0.0,
            ..Default::default()
        };
        let tr = run(&c).unwrap();
        assert_eq!(tr.samples.len(), 1);
        assert_eq!(tr.samples[0].t(), 0.0);
        assert_eq!(tr.summary.budget.defect(), 0.0);
    }

    #[test]
    fn strides_and_final_sample() {
        let c = SolverConfig {
            n: 8,
            t_end: 0.0105,
            sample_stride: 4,
            ..Default::default()
        };
        let tr = run(&c).unwrap();
        let ts: Vec<f64> = tr.samples.iter().map(|s| s.t()).collect();
        assert_eq!(ts, vec![0.0, 0.004, 0.008, 0.0105]);
        assert_eq!(tr.summary.steps, 11);
    }

    #[test]
    fn large_dt_warns() {
        let c = SolverConfig {
            n: 16,
            dt: 0.5,
            t_end: 0.5,
            ..Default::default()
        };
        let tr = run(&c).unwrap();
        assert_eq!(tr.summary.warnings.len(), 1);
    }
}
