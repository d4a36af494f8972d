//! Population-transfer objective.
//!
//! The source state `(0, 0, sin a, cos a)` must reach `(cos b, sin b, 0, 0)` at `T`.
//! Splitting `Phi(T, 0)` into 2x2 blocks `[[A, B], [C, D]]`, this requires `D = 0` and
//! `B (sin a, cos a) = (cos b, sin b)`. Two endpoint families make `D` vanish:
//!
//! * branch a: `g1(T) = pi/2`, `g2(T) = 0`, `g3(T) = -(a + b)`
//! * branch b: `g1(T) = 0`, `g2(T) = pi/2`, `g3(T) = pi/2 - (a + b)`

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::algebra::{transition_matrix, BaseCoordinates, Matrix4};
use crate::dynamics::{RealState, Trajectory};
use crate::error::{Error, Result};
use crate::flatness::{FlatDesign, G1Branch, ParameterProfile};
use crate::weinorman::cbh_coefficients;

/// Bound on `|D|_inf` before the endpoint conditions count as violated.
pub const ENDPOINT_TOL: f64 = 1e-9;

/// Bound on `|f3|` along a designed trajectory.
pub const BINDING_TOL: f64 = 1e-9;

/// Endpoint family for which the `D` block of `Phi(T, 0)` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// `cos g1 = sin g2 = 0`.
    A,
    /// `sin g1 = cos g2 = 0`.
    #[default]
    B,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::A => "a",
            Branch::B => "b",
        })
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Branch> {
        match s.trim() {
            "a" | "A" => Ok(Branch::A),
            "b" | "B" => Ok(Branch::B),
            other => Err(Error::InvalidArgument(format!("unknown branch '{other}' (expected a or b)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferSpec {
    pub alpha: f64,
    pub beta: f64,
    pub horizon: f64,
    pub branch: Branch,
}

impl TransferSpec {
    pub fn new(alpha: f64, beta: f64, horizon: f64, branch: Branch) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::NonFinite("alpha/beta"));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!("transfer time must be positive, got {horizon}")));
        }
        Ok(TransferSpec { alpha, beta, horizon, branch })
    }

    /// The Reference scenario: `a = -2pi/3`, `b = pi/3`, `T = 10`, branch b.
    pub fn reference_scenario() -> Self {
        TransferSpec {
            alpha: -2.0 * PI / 3.0,
            beta: PI / 3.0,
            horizon: 10.0,
            branch: Branch::B,
        }
    }

    pub fn initial_state(&self) -> RealState {
        initial_state(self.alpha)
    }

    pub fn target_state(&self) -> RealState {
        target_state(self.beta)
    }

    pub fn boundary_targets(&self) -> BoundaryTargets {
        boundary_targets(self)
    }
}

pub fn initial_state(alpha: f64) -> RealState {
    let (s, c) = alpha.sin_cos();
    RealState::new(0.0, 0.0, s, c)
}

pub fn target_state(beta: f64) -> RealState {
    let (s, c) = beta.sin_cos();
    RealState::new(c, s, 0.0, 0.0)
}

/// Values of the base functions at `t = 0` and `t = T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryTargets {
    pub g1_0: f64,
    pub g2_0: f64,
    pub g3_0: f64,
    pub g1_t: f64,
    pub g2_t: f64,
    pub g3_t: f64,
}

impl BoundaryTargets {
    pub fn final_coordinates(&self) -> BaseCoordinates {
        BaseCoordinates::new(self.g1_t, self.g2_t, self.g3_t)
    }
}

pub fn boundary_targets(spec: &TransferSpec) -> BoundaryTargets {
    let sum = spec.alpha + spec.beta;
    let (g1_t, g2_t, g3_t) = match spec.branch {
        Branch::A => (FRAC_PI_2, 0.0, -sum),
        Branch::B => (0.0, FRAC_PI_2, FRAC_PI_2 - sum),
    };
    BoundaryTargets {
        g1_0: 0.0,
        g2_0: 0.0,
        g3_0: 0.0,
        g1_t,
        g2_t,
        g3_t,
    }
}

/// `Phi(T, 0)` assembled directly from the boundary targets.
pub fn endpoint_transition(spec: &TransferSpec) -> Matrix4 {
    transition_matrix(&boundary_targets(spec).final_coordinates())
        .expect("boundary targets are finite for a valid spec")
}

pub type Block2 = [[f64; 2]; 2];

/// The four 2x2 blocks of a 4x4 matrix, `[[A, B], [C, D]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDecomposition {
    pub a: Block2,
    pub b: Block2,
    pub c: Block2,
    pub d: Block2,
}

impl BlockDecomposition {
    pub fn reassemble(&self) -> Matrix4 {
        let mut m = Matrix4::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = self.a[i][j];
                m[(i, j + 2)] = self.b[i][j];
                m[(i + 2, j)] = self.c[i][j];
                m[(i + 2, j + 2)] = self.d[i][j];
            }
        }
        m
    }
}

pub fn block_max_abs(block: &Block2) -> f64 {
    block.iter().flatten().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn extract_blocks(phi: &Matrix4) -> BlockDecomposition {
    let block = |r0: usize, c0: usize| -> Block2 {
        [
            [phi[(r0, c0)], phi[(r0, c0 + 1)]],
            [phi[(r0 + 1, c0)], phi[(r0 + 1, c0 + 1)]],
        ]
    };
    BlockDecomposition {
        a: block(0, 0),
        b: block(0, 2),
        c: block(2, 0),
        d: block(2, 2),
    }
}

/// `w_T = B (sin a, cos a)`, valid once the `D` block has vanished.
pub fn predicted_final(blocks: &BlockDecomposition, alpha: f64) -> Result<[f64; 2]> {
    let norm = block_max_abs(&blocks.d);
    if norm > ENDPOINT_TOL {
        return Err(Error::EndpointViolation { norm });
    }
    let (s, c) = alpha.sin_cos();
    let b = &blocks.b;
    Ok([b[0][0] * s + b[0][1] * c, b[1][0] * s + b[1][1] * c])
}

/// Default flat design for a transfer spec.
///
/// Branch b: linear `g2` from 0 to `pi/2` and cubic Hermite `g3`, principal `g1`.
/// Branch a: `g2 = 4 a s (1 - s)` returns to zero, so `g2'` changes sign at `T/2` and the
/// extended `g1` branch is used. The peak `a` is `pi/8` when `g3(T) < 0` and `3pi/8`
/// otherwise, which puts the binding angle at `+pi/2` at mid-horizon so that it ends at
/// `+pi` (`g1(T) = pi/2`).
pub fn default_design(spec: &TransferSpec) -> Result<FlatDesign> {
    let targets = boundary_targets(spec);
    let g3 = ParameterProfile::cubic_hermite(targets.g3_0, targets.g3_t, spec.horizon)?;
    match spec.branch {
        Branch::B => {
            let g2 = ParameterProfile::linear(targets.g2_0, targets.g2_t, spec.horizon)?;
            FlatDesign::new(g2, g3)
        }
        Branch::A => {
            let g2 = ParameterProfile::arch(branch_a_arch_amplitude(targets.g3_t), spec.horizon)?;
            FlatDesign::with_branch(g2, g3, G1Branch::Extended)
        }
    }
}

/// Peak of the branch-a `g2` arch, chosen from the sign of `g3(T)`.
pub fn branch_a_arch_amplitude(g3_t: f64) -> f64 {
    if g3_t < 0.0 {
        PI / 8.0
    } else {
        3.0 * PI / 8.0
    }
}

/// Outcome of checking a trajectory against a transfer spec.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// `|x(T) - target|_inf`.
    pub final_state_error_inf: f64,
    /// `x3(T)^2 + x4(T)^2`.
    pub residual_population: f64,
    pub max_norm_drift: f64,
    pub max_f3_residual: f64,
    /// Integrated vs closed-form state, 0 when the trajectory has no closed form.
    pub oracle_mismatch_inf: f64,
    pub passed: bool,
    pub tol: f64,
    pub binding_tol: f64,
    pub failures: Vec<String>,
}

pub fn verify_transfer(traj: &Trajectory, spec: &TransferSpec, tol: f64) -> VerificationReport {
    let mut failures = Vec::new();
    let last = traj.last();
    if traj.initial().t != 0.0 || (last.t - spec.horizon).abs() > 1e-9 * spec.horizon {
        failures.push(format!(
            "trajectory covers [{}, {}], expected [0, {}]",
            traj.initial().t,
            last.t,
            spec.horizon
        ));
    }

    let final_state_error_inf = last.state.max_abs_diff(&spec.target_state());
    let residual_population = last.populations().1;
    let max_norm_drift = traj.max_norm_drift();
    let oracle_mismatch_inf = traj.max_oracle_mismatch().unwrap_or(0.0);

    let mut max_f3_residual: f64 = 0.0;
    for node in &traj.nodes {
        if let Some(coords) = node.coords.filter(|c| c.rates.is_some()) {
            match cbh_coefficients(&coords) {
                Ok(f) => max_f3_residual = max_f3_residual.max(f.f3.abs()),
                Err(e) => failures.push(format!("t = {}: {e}", node.t)),
            }
        }
    }

    let checks = [
        ("final state error", final_state_error_inf, tol),
        ("residual population", residual_population, tol),
        ("norm drift", max_norm_drift, tol),
        ("oracle mismatch", oracle_mismatch_inf, tol),
        ("binding residual |f3|", max_f3_residual, BINDING_TOL),
    ];
    for (name, value, bound) in checks {
        if value.is_nan() || value > bound {
            failures.push(format!("{name} {value:e} exceeds {bound:e}"));
        }
    }

    VerificationReport {
        final_state_error_inf,
        residual_population,
        max_norm_drift,
        max_f3_residual,
        oracle_mismatch_inf,
        passed: failures.is_empty(),
        tol,
        binding_tol: BINDING_TOL,
        failures,
    }
}
