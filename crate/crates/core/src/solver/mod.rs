//! Dealiased pseudo-spectral Navier-Stokes on the periodic box.

mod checkpoint;
mod config;
mod init;
mod integrator;
mod nonlinear;
mod pressure;
mod run;
mod state;

pub use checkpoint::{
    load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, Checkpoint,
};
pub use config::{stability_limit, stability_warning, InitialCondition, SolverConfig};
pub use init::{initial_state, random_divfree_init, taylor_green_init};
pub use integrator::{step, Stepper, BLOW_UP_FACTOR};
pub use nonlinear::{convective_term, nonlinear_term};
pub use pressure::{check_pressure_estimates, pressure_coeffs, pressure_solve, PressureRatios};
pub use run::{
    run, run_from, run_observed, Diagnostics, EnergyBudget, RunSummary, Trajectory,
    TrajectorySample,
};
pub use state::{FlowState, DIVERGENCE_TOLERANCE};
