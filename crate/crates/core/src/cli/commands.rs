//! design -> synthesize -> simulate -> verify pipeline behind the subcommands.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use super::config::{ConfigError, ScenarioConfig};
use super::output::{self, SweepRow};
use super::plot::{line_chart, Series};
use crate::dynamics::{integrate, uniform_grid, Trajectory};
use crate::error::Error;
use crate::flatness::DesignSample;
use crate::transfer::{boundary_targets, verify_transfer, TransferSpec, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Default verification tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("numerical error: {0}")]
    Numerical(#[from] Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_INVALID,
            CliError::Numerical(_) | CliError::Io { .. } => EXIT_NUMERICAL,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Flat-output samples on the simulation grid, evaluated pointwise.
pub fn design_samples(cfg: &ScenarioConfig) -> Result<Vec<DesignSample>, CliError> {
    let design = cfg.design()?;
    let samples = uniform_grid(design.horizon(), cfg.steps)
        .into_iter()
        .map(|t| design.sample(t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(samples)
}

/// Writes `<prefix>_design.csv`.
pub fn cmd_design(cfg: &ScenarioConfig) -> Result<PathBuf, CliError> {
    let samples = design_samples(cfg)?;
    let path = cfg.output_path("_design.csv");
    output::write_design_csv(&path, &samples).map_err(io_err(&path))?;
    Ok(path)
}

/// Integrates the designed controls from the scenario's initial state.
pub fn run_simulation(cfg: &ScenarioConfig) -> Result<(TransferSpec, Trajectory), CliError> {
    let spec = cfg.transfer_spec()?;
    let design = cfg.design()?;
    let traj = integrate(&design, spec.initial_state(), cfg.steps)?;
    Ok((spec, traj))
}

#[derive(Debug)]
pub struct SimulationOutput {
    pub trajectory: Trajectory,
    pub files: Vec<PathBuf>,
}

/// Writes `<prefix>_traj.csv`, `<prefix>_lab.csv` when energy levels are set, and
/// optionally the SVG figures.
pub fn cmd_simulate(cfg: &ScenarioConfig, plots: bool) -> Result<SimulationOutput, CliError> {
    let (_, trajectory) = run_simulation(cfg)?;
    let mut files = Vec::new();

    let path = cfg.output_path("_traj.csv");
    output::write_trajectory_csv(&path, &trajectory).map_err(io_err(&path))?;
    files.push(path);

    if let Some(levels) = &cfg.energy_levels {
        let path = cfg.output_path("_lab.csv");
        output::write_lab_csv(&path, &trajectory, levels).map_err(io_err(&path))?;
        files.push(path);
    }

    if plots {
        for (path, svg) in figures(cfg, &trajectory) {
            match fs::write(&path, svg) {
                Ok(()) => files.push(path),
                Err(e) => eprintln!("warning: could not write {}: {e}", path.display()),
            }
        }
    }
    Ok(SimulationOutput { trajectory, files })
}

fn figures(cfg: &ScenarioConfig, traj: &Trajectory) -> Vec<(PathBuf, String)> {
    let series = |label: &'static str, f: &dyn Fn(&crate::dynamics::TrajectoryNode) -> f64| Series {
        label,
        points: traj.nodes.iter().map(|n| (n.t, f(n))).collect(),
    };
    let g = |i: usize| move |n: &crate::dynamics::TrajectoryNode| n.coords.map_or(f64::NAN, |c| c.as_array()[i]);
    let x = |i: usize| move |n: &crate::dynamics::TrajectoryNode| n.state.0[i];

    vec![
        (
            cfg.output_path("_base_functions.svg"),
            line_chart(
                "Independent parameter functions g2, g3",
                "t",
                "rad",
                &[series("g2", &g(1)), series("g3", &g(2))],
            ),
        ),
        (
            cfg.output_path("_g1.svg"),
            line_chart("Dependent base function g1", "t", "rad", &[series("g1", &g(0))]),
        ),
        (
            cfg.output_path("_controls.svg"),
            line_chart(
                "Control variables u1(t), u2(t)",
                "t",
                "u",
                &[series("u1", &|n| n.controls.u1), series("u2", &|n| n.controls.u2)],
            ),
        ),
        (
            cfg.output_path("_states_w.svg"),
            line_chart("State variables x1, x2", "t", "x", &[series("x1", &x(0)), series("x2", &x(1))]),
        ),
        (
            cfg.output_path("_states_v.svg"),
            line_chart("State variables x3, x4", "t", "x", &[series("x3", &x(2)), series("x4", &x(3))]),
        ),
        (
            cfg.output_path("_populations.svg"),
            line_chart(
                "Population change",
                "t",
                "population",
                &[
                    series("x1^2 + x2^2", &|n| n.populations().0),
                    series("x3^2 + x4^2", &|n| n.populations().1),
                ],
            ),
        ),
    ]
}

/// Runs the pipeline and checks the result without writing anything.
pub fn run_verification(cfg: &ScenarioConfig, tol: f64) -> Result<VerificationReport, CliError> {
    let (spec, traj) = run_simulation(cfg)?;
    Ok(verify_transfer(&traj, &spec, tol))
}

/// Writes `<prefix>_report.txt` and returns the report; exit status follows `passed`.
pub fn cmd_verify(cfg: &ScenarioConfig, tol: f64) -> Result<VerificationReport, CliError> {
    check_tol(tol)?;
    let report = run_verification(cfg, tol)?;
    let path = cfg.output_path("_report.txt");
    output::write_report(&path, &report).map_err(io_err(&path))?;
    Ok(report)
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::Validation(format!("tol must be positive, got {tol}")).into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Alpha,
    Beta,
    TransferTime,
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "alpha" => Ok(SweepParameter::Alpha),
            "beta" => Ok(SweepParameter::Beta),
            "T" | "t" | "transfer_time" => Ok(SweepParameter::TransferTime),
            _ => Err(format!("unknown sweep parameter '{s}' (expected alpha, beta or T)")),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParameter::Alpha => "alpha",
            SweepParameter::Beta => "beta",
            SweepParameter::TransferTime => "T",
        })
    }
}

/// `count` evenly spaced values from `from` to `to` inclusive; `count = 1` gives `[from]`.
pub fn sweep_values(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![from],
        n => (0..n)
            .map(|k| if k == n - 1 { to } else { from + (to - from) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

fn sweep_row(base: &ScenarioConfig, param: SweepParameter, value: f64, tol: f64) -> SweepRow {
    let mut cfg = base.clone();
    match param {
        SweepParameter::Alpha => cfg.alpha_rad = value,
        SweepParameter::Beta => cfg.beta_rad = value,
        SweepParameter::TransferTime => cfg.transfer_time = value,
    }
    let spec = TransferSpec {
        alpha: cfg.alpha_rad,
        beta: cfg.beta_rad,
        horizon: cfg.transfer_time,
        branch: cfg.branch,
    };
    let outcome = cfg
        .validate()
        .map_err(CliError::from)
        .and_then(|()| run_verification(&cfg, tol))
        .map_err(|e| e.to_string());
    SweepRow {
        value,
        g3_t: boundary_targets(&spec).g3_t,
        outcome,
    }
}

/// Verifies one scenario per swept value and writes `<prefix>_sweep.csv`.
/// Rows run in parallel; a failing row is recorded and the sweep continues.
pub fn cmd_sweep(
    cfg: &ScenarioConfig,
    param: SweepParameter,
    from: f64,
    to: f64,
    count: usize,
    tol: f64,
) -> Result<Vec<SweepRow>, CliError> {
    check_tol(tol)?;
    if count == 0 {
        return Err(ConfigError::Validation("sweep count must be at least 1".into()).into());
    }
    if !from.is_finite() || !to.is_finite() {
        return Err(ConfigError::Validation("sweep range must be finite".into()).into());
    }
    let rows: Vec<SweepRow> = sweep_values(from, to, count)
        .into_par_iter()
        .map(|v| sweep_row(cfg, param, v, tol))
        .collect();
    let path = cfg.output_path("_sweep.csv");
    output::write_sweep_csv(&path, &rows).map_err(io_err(&path))?;
    Ok(rows)
}
