//! Command-line surface: scenario files, output files and the subcommand pipeline.

pub mod commands;
pub mod config;
pub mod output;
pub mod plot;

pub use commands::{
    cmd_design, cmd_simulate, cmd_sweep, cmd_verify, design_samples, run_simulation, run_verification, CliError,
    SweepParameter, DEFAULT_TOL, EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, EXIT_VERIFY_FAILED,
};
pub use config::{load_config, parse_config, ConfigError, ProfileSpec, ScenarioConfig};
