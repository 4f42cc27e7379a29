//! Criterion quantities along trajectories, their Gronwall bounds, and
//! link-by-link checks of the estimates behind them.

mod calibrate;
mod chains;
mod gronwall;
mod quantities;
mod report;
mod series;
mod spec;
mod split;

pub use calibrate::{
    calibrate, gronwall_name, pressure_name, pressure_parameters, split_name, CalibratedConstant,
    CalibrationSpec, ConstantSet, EQUIVALENCE_MAX, EQUIVALENCE_MIN, HORIZONTAL_TRILINEAR,
    LADYZHENSKAYA_R4, VORTICITY_A3, VORTICITY_GRADIENT,
};
pub use chains::{
    embedding_ratio, equivalence_check, equivalence_ratio, verify_horizontal_links,
    verify_ladyzhenskaya, verify_pressure_links, verify_vorticity_links, vorticity_balance,
    BalanceCheck, EquivalenceCheck, HorizontalLinks, LadyzhenskayaReport, Link, PressureLinks,
    VorticityConstants, VorticityLinks, EXACT_TOLERANCE, IDENTITY_TOLERANCE,
};
pub use gronwall::{amplitude_sup_rate, gronwall_bound, initial_value, rate_constant, u3_lebesgue};
pub use quantities::{criterion_value, criterion_values, Snapshot};
pub use report::{
    run_monitor, CriterionReport, LinkStat, Monitor, MonitorReport, Verdict, DOMINANCE_SLACK,
};
pub use series::{bochner_integral, running_integral, TimeSeries};
pub use spec::{
    pressure_exponent_t14, pressure_exponent_t15, split_exponent, Companion, CriterionSpec,
    ExponentPair, Quantity, Term, TheoremId, DEFAULT_S,
};
pub use split::{
    frequency_split_verify, FrequencySplitParams, SplitConstants, SplitOutcome, SplitReport,
};
