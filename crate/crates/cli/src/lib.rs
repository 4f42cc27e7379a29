//! Configuration parsing and experiment orchestration behind the `besovns`
//! binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{
    calibrate_command, exit_code, load_or_calibrate, run_command, run_ensemble, run_experiment,
    verify_command, Context, REPORT_HEADER,
};
pub use config::{parse_config, serialize_config, ConfigError, EnsembleConfig, OutputConfig, RunConfig};
