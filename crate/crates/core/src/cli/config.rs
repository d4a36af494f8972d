//! Scenario files: flat `key = value` lines, `#` starts a comment.
//!
//! ```text
//! # reference scenario
//! alpha_rad     = -2*pi/3
//! beta_rad      = pi/3
//! transfer_time = 10
//! branch        = b
//! ```
//!
//! Angle and time values accept plain floats or simple multiples of pi
//! (`pi`, `-pi/2`, `2*pi/3`, `5pi/6`, `0.25*pi`).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::dynamics::{EnergyLevels, DEFAULT_STEPS};
use crate::error::Error as DesignError;
use crate::flatness::{FlatDesign, G1Branch, ParameterProfile};
use crate::transfer::{boundary_targets, branch_a_arch_amplitude, default_design, Branch, TransferSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error("invalid scenario: {0}")]
    Design(#[from] DesignError),
}

/// How a base-function profile is built from the scenario's boundary targets.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ProfileSpec {
    /// Branch default: linear/cubic for branch b, arch/cubic for branch a.
    #[default]
    Auto,
    /// Straight line between the boundary targets.
    Linear,
    /// Cubic Hermite between the boundary targets (zero end slopes).
    Cubic,
    /// `4 a s (1 - s)`; amplitude picked from the sign of `g3(T)` when absent.
    Arch(Option<f64>),
    /// Coefficients in normalized time `s = t / T`.
    Polynomial(Vec<f64>),
    Constant(f64),
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSpec::Auto => write!(f, "auto"),
            ProfileSpec::Linear => write!(f, "linear"),
            ProfileSpec::Cubic => write!(f, "cubic"),
            ProfileSpec::Arch(None) => write!(f, "arch"),
            ProfileSpec::Arch(Some(a)) => write!(f, "arch:{a}"),
            ProfileSpec::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            ProfileSpec::Constant(v) => write!(f, "constant:{v}"),
        }
    }
}

impl FromStr for ProfileSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s, None),
        };
        match (kind, arg) {
            ("auto", None) => Ok(ProfileSpec::Auto),
            ("linear", None) => Ok(ProfileSpec::Linear),
            ("cubic", None) => Ok(ProfileSpec::Cubic),
            ("arch", None) => Ok(ProfileSpec::Arch(None)),
            ("arch", Some(a)) => parse_scalar(a).map(|v| ProfileSpec::Arch(Some(v))),
            ("constant", Some(a)) => parse_scalar(a).map(ProfileSpec::Constant),
            ("poly", Some(a)) => a
                .split(',')
                .map(parse_scalar)
                .collect::<Result<Vec<_>, _>>()
                .map(ProfileSpec::Polynomial),
            _ => Err(format!(
                "unknown profile '{s}' (expected auto, linear, cubic, arch[:a], poly:c0,c1,..., constant:v)"
            )),
        }
    }
}

/// Parses a float or a simple multiple of pi.
pub fn parse_scalar(text: &str) -> Result<f64, String> {
    let s: String = text.split_whitespace().collect::<String>().to_ascii_lowercase();
    let bad = || format!("cannot parse '{}' as a number", text.trim());
    let value = match s.find("pi") {
        None => s.parse::<f64>().map_err(|_| bad())?,
        Some(pos) => {
            let coef = s[..pos].trim_end_matches('*');
            let factor = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            let rest = &s[pos + 2..];
            let divisor = match rest {
                "" => 1.0,
                r => match r.strip_prefix('/') {
                    Some(d) => d.parse::<f64>().map_err(|_| bad())?,
                    None => return Err(bad()),
                },
            };
            factor * std::f64::consts::PI / divisor
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("'{}' is not finite", text.trim()))
    }
}

pub fn parse_branch(text: &str) -> Result<Branch, String> {
    text.parse::<Branch>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub alpha_rad: f64,
    pub beta_rad: f64,
    pub transfer_time: f64,
    pub branch: Branch,
    pub steps: usize,
    pub g2_profile: ProfileSpec,
    pub g3_profile: ProfileSpec,
    pub energy_levels: Option<EnergyLevels>,
    pub output_prefix: String,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let spec = TransferSpec::reference_scenario();
        ScenarioConfig {
            alpha_rad: spec.alpha,
            beta_rad: spec.beta,
            transfer_time: spec.horizon,
            branch: spec.branch,
            steps: DEFAULT_STEPS,
            g2_profile: ProfileSpec::Auto,
            g3_profile: ProfileSpec::Auto,
            energy_levels: None,
            output_prefix: "scenario".to_string(),
        }
    }
}

const KEYS: [&str; 10] = [
    "alpha_rad",
    "beta_rad",
    "transfer_time",
    "branch",
    "steps",
    "g2_profile",
    "g3_profile",
    "energy_e1",
    "energy_e2",
    "output_prefix",
];

impl ScenarioConfig {
    /// Parses without checking the scenario invariants.
    pub fn parse_unvalidated(text: &str) -> Result<ScenarioConfig, ConfigError> {
        let mut cfg = ScenarioConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        let (mut e1, mut e2) = (None, None);

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("expected 'key = value', found '{content}'"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(ConfigError::UnknownKey { line, key: key.to_string() });
            };
            if seen.contains(&known) {
                return Err(ConfigError::Parse { line, message: format!("duplicate key '{key}'") });
            }
            seen.push(known);

            let err = |message: String| ConfigError::Parse { line, message };
            match known {
                "alpha_rad" => cfg.alpha_rad = parse_scalar(value).map_err(err)?,
                "beta_rad" => cfg.beta_rad = parse_scalar(value).map_err(err)?,
                "transfer_time" => cfg.transfer_time = parse_scalar(value).map_err(err)?,
                "branch" => cfg.branch = parse_branch(value).map_err(err)?,
                "steps" => {
                    cfg.steps = value
                        .parse::<usize>()
                        .map_err(|_| err(format!("steps must be a positive integer, got '{value}'")))?
                }
                "g2_profile" => cfg.g2_profile = value.parse().map_err(err)?,
                "g3_profile" => cfg.g3_profile = value.parse().map_err(err)?,
                "energy_e1" => e1 = Some(parse_scalar(value).map_err(err)?),
                "energy_e2" => e2 = Some(parse_scalar(value).map_err(err)?),
                "output_prefix" => {
                    if value.is_empty() {
                        return Err(err("output_prefix must not be empty".into()));
                    }
                    cfg.output_prefix = value.to_string()
                }
                _ => unreachable!("key list and match arms agree"),
            }
        }

        cfg.energy_levels = match (e1, e2) {
            (Some(e1), Some(e2)) => Some(EnergyLevels { e1, e2 }),
            (None, None) => None,
            _ => {
                return Err(ConfigError::Validation(
                    "energy_e1 and energy_e2 must be given together".into(),
                ))
            }
        };
        Ok(cfg)
    }

    /// Checks the scenario invariants, including the flat-design invariants of the profiles.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.transfer_time.is_finite() && self.transfer_time > 0.0) {
            return Err(ConfigError::Validation(format!(
                "transfer_time must be positive, got {}",
                self.transfer_time
            )));
        }
        if self.steps < 2 {
            return Err(ConfigError::Validation(format!("steps must be at least 2, got {}", self.steps)));
        }
        self.transfer_spec()?;
        self.design()?;
        Ok(())
    }

    pub fn transfer_spec(&self) -> Result<TransferSpec, ConfigError> {
        Ok(TransferSpec::new(self.alpha_rad, self.beta_rad, self.transfer_time, self.branch)?)
    }

    /// Builds the flat design described by the profile descriptors.
    pub fn design(&self) -> Result<FlatDesign, ConfigError> {
        let spec = self.transfer_spec()?;
        if self.g2_profile == ProfileSpec::Auto && self.g3_profile == ProfileSpec::Auto {
            return Ok(default_design(&spec)?);
        }
        let targets = boundary_targets(&spec);
        let horizon = spec.horizon;
        let build = |p: &ProfileSpec, start: f64, end: f64, auto: ProfileSpec| -> Result<ParameterProfile, ConfigError> {
            let p = if *p == ProfileSpec::Auto { auto } else { p.clone() };
            Ok(match p {
                ProfileSpec::Auto => unreachable!("auto resolved above"),
                ProfileSpec::Linear => ParameterProfile::linear(start, end, horizon)?,
                ProfileSpec::Cubic => ParameterProfile::cubic_hermite(start, end, horizon)?,
                ProfileSpec::Arch(a) => ParameterProfile::arch(
                    a.unwrap_or_else(|| branch_a_arch_amplitude(targets.g3_t)),
                    horizon,
                )?,
                ProfileSpec::Polynomial(c) => ParameterProfile::polynomial(c, horizon)?,
                ProfileSpec::Constant(v) => ParameterProfile::constant(v, horizon)?,
            })
        };
        let g2_auto = match spec.branch {
            Branch::A => ProfileSpec::Arch(None),
            Branch::B => ProfileSpec::Linear,
        };
        let g2 = build(&self.g2_profile, targets.g2_0, targets.g2_t, g2_auto)?;
        let g3 = build(&self.g3_profile, targets.g3_0, targets.g3_t, ProfileSpec::Cubic)?;
        let branch = match spec.branch {
            Branch::A => G1Branch::Extended,
            Branch::B => G1Branch::Principal,
        };
        Ok(FlatDesign::with_branch(g2, g3, branch)?)
    }

    /// `<prefix><suffix>`.
    pub fn output_path(&self, suffix: &str) -> PathBuf {
        PathBuf::from(format!("{}{}", self.output_prefix, suffix))
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg = ScenarioConfig::parse_unvalidated(text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads, parses and validates a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("10").unwrap(), 10.0);
        assert_eq!(parse_scalar(" -2.5e-1 ").unwrap(), -0.25);
        assert_eq!(parse_scalar("pi").unwrap(), PI);
        assert_eq!(parse_scalar("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_scalar("-2*pi/3").unwrap(), -2.0 * PI / 3.0);
        assert_eq!(parse_scalar("5pi/6").unwrap(), 5.0 * PI / 6.0);
        assert_eq!(parse_scalar("0.25 * PI").unwrap(), 0.25 * PI);
        for bad in ["", "abc", "pi/", "2*pi*3", "inf", "pi/0"] {
            assert!(parse_scalar(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn profile_descriptors() {
        assert_eq!("linear".parse::<ProfileSpec>().unwrap(), ProfileSpec::Linear);
        assert_eq!("arch".parse::<ProfileSpec>().unwrap(), ProfileSpec::Arch(None));
        assert_eq!(
            "poly: 0, pi/2".parse::<ProfileSpec>().unwrap(),
            ProfileSpec::Polynomial(vec![0.0, PI / 2.0])
        );
        assert_eq!("constant:0.3".parse::<ProfileSpec>().unwrap(), ProfileSpec::Constant(0.3));
        assert!("spline".parse::<ProfileSpec>().is_err());
        assert!("poly:".parse::<ProfileSpec>().is_err());
    }

    #[test]
    fn full_file() {
        let cfg = parse_config(
            "# comment\n\nalpha_rad = -2*pi/3 # trailing\nbeta_rad=pi/3\ntransfer_time = 10\nbranch = b\nsteps = 500\nenergy_e1 = 0\nenergy_e2 = 1.5\noutput_prefix = out/run\n",
        )
        .unwrap();
        assert_eq!(cfg.alpha_rad, -2.0 * PI / 3.0);
        assert_eq!(cfg.steps, 500);
        assert_eq!(cfg.energy_levels, Some(EnergyLevels { e1: 0.0, e2: 1.5 }));
        assert_eq!(cfg.output_path("_traj.csv"), PathBuf::from("out/run_traj.csv"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_config("alpha_rad = 1\n\nfoo = 2\n") {
            Err(ConfigError::UnknownKey { line, key }) => assert_eq!((line, key.as_str()), (3, "foo")),
            other => panic!("{other:?}"),
        }
        match parse_config("alpha_rad = 1\nbeta_rad = x\n") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("alpha_rad 1\n"), Err(ConfigError::Parse { line: 1, .. })));
        assert!(matches!(parse_config("steps = 3\nsteps = 4\n"), Err(ConfigError::Parse { line: 2, .. })));
        assert!(matches!(parse_config("branch = c\n"), Err(ConfigError::Parse { line: 1, .. })));
    }

    #[test]
    fn invariants_are_checked() {
        assert!(matches!(parse_config("transfer_time = 0\n"), Err(ConfigError::Validation(_))));
        assert!(matches!(parse_config("steps = 1\n"), Err(ConfigError::Validation(_))));
        assert!(matches!(parse_config("energy_e1 = 1\n"), Err(ConfigError::Validation(_))));
        let err = parse_config("g2_profile = constant:0.2\n").unwrap_err();
        assert!(matches!(err, ConfigError::Design(DesignError::DegenerateProfile { .. })));
        assert!(err.to_string().contains("degenerate"));
    }

    #[test]
    fn explicit_profiles_match_default_design() {
        let auto = ScenarioConfig::default().design().unwrap();
        let cfg = ScenarioConfig {
            g2_profile: ProfileSpec::Linear,
            g3_profile: ProfileSpec::Cubic,
            ..ScenarioConfig::default()
        };
        assert_eq!(cfg.design().unwrap(), auto);
    }
}
