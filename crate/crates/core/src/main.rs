use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qubit_transfer::cli::config::{parse_branch, parse_scalar};
use qubit_transfer::cli::{
    cmd_design, cmd_simulate, cmd_sweep, cmd_verify, load_config, CliError, ScenarioConfig, SweepParameter,
    DEFAULT_TOL, EXIT_OK, EXIT_VERIFY_FAILED,
};
use qubit_transfer::transfer::Branch;

/// Design and verify open-loop population-transfer pulses for a qubit.
#[derive(Parser)]
#[command(name = "qubit-transfer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the flat design (g1, g2, g3, u1, u2) without integrating anything.
    Design(Scenario),
    /// Integrate the state equation under the designed controls.
    Simulate {
        #[command(flatten)]
        scenario: Scenario,
        /// Also write SVG figures next to the CSV.
        #[arg(long)]
        plots: bool,
    },
    /// Run both propagation paths and write a verification report.
    Verify {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long, value_parser = parse_scalar, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Verify a family of scenarios over one parameter.
    Sweep {
        #[command(flatten)]
        scenario: Scenario,
        /// alpha, beta or T.
        #[arg(long)]
        param: SweepParameter,
        #[arg(long, value_parser = parse_scalar, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, value_parser = parse_scalar, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_parser = parse_scalar, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

/// Scenario file plus overrides; flags win over file values.
#[derive(Args)]
struct Scenario {
    /// Scenario file (key = value lines). Defaults to the reference scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_scalar, allow_hyphen_values = true)]
    alpha_rad: Option<f64>,
    #[arg(long, value_parser = parse_scalar, allow_hyphen_values = true)]
    beta_rad: Option<f64>,
    #[arg(long, value_parser = parse_scalar)]
    transfer_time: Option<f64>,
    #[arg(long, value_parser = parse_branch)]
    branch: Option<Branch>,
    #[arg(long)]
    steps: Option<usize>,
    /// Output path prefix.
    #[arg(long)]
    out: Option<String>,
}

impl Scenario {
    fn resolve(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(v) = self.alpha_rad {
            cfg.alpha_rad = v;
        }
        if let Some(v) = self.beta_rad {
            cfg.beta_rad = v;
        }
        if let Some(v) = self.transfer_time {
            cfg.transfer_time = v;
        }
        if let Some(v) = self.branch {
            cfg.branch = v;
        }
        if let Some(v) = self.steps {
            cfg.steps = v;
        }
        if let Some(v) = &self.out {
            cfg.output_prefix = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Design(scenario) => {
            let path = cmd_design(&scenario.resolve()?)?;
            println!("wrote {}", path.display());
            Ok(EXIT_OK)
        }
        Command::Simulate { scenario, plots } => {
            let out = cmd_simulate(&scenario.resolve()?, plots)?;
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            let last = out.trajectory.last();
            let (pop_w, pop_v) = last.populations();
            println!("x(T) = {:?}  pop_w = {pop_w:.12}  pop_v = {pop_v:.3e}", last.state.0);
            Ok(EXIT_OK)
        }
        Command::Verify { scenario, tol } => {
            let report = cmd_verify(&scenario.resolve()?, tol)?;
            print!("{}", qubit_transfer::cli::output::render_report(&report));
            Ok(if report.passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Sweep { scenario, param, from, to, count, tol } => {
            let rows = cmd_sweep(&scenario.resolve()?, param, from, to, count, tol)?;
            let mut all_passed = true;
            for row in &rows {
                match &row.outcome {
                    Ok(rep) => {
                        all_passed &= rep.passed;
                        println!(
                            "{param} = {:<12.6} g3_T = {:<10.6} error = {:.3e} passed = {}",
                            row.value, row.g3_t, rep.final_state_error_inf, rep.passed
                        );
                    }
                    Err(e) => {
                        all_passed = false;
                        println!("{param} = {:<12.6} error: {e}", row.value);
                    }
                }
            }
            Ok(if all_passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
