//! Propagation of the bilinear state equation `x' = (u1 F1 + u2 F2) x`.
//!
//! Two independent paths produce a [`Trajectory`]: fixed-step RK4 on the ODE with
//! controls evaluated at every stage time, and the closed-form product of
//! exponentials evaluated pointwise. Lab-frame conversions are output helpers.

use num_complex::Complex64;

use crate::algebra::{transition_matrix, BaseCoordinates, Generator, Matrix4};
use crate::error::{Error, Result};
use crate::flatness::{Controls, FlatDesign};

/// Default number of RK4 steps.
pub const DEFAULT_STEPS: usize = 10_000;

/// Real amplitudes `(x1, x2, x3, x4)` with `psi1 = x1 + i x2`, `psi2 = x3 + i x4`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RealState(pub [f64; 4]);

impl RealState {
    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        RealState([x1, x2, x3, x4])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn populations(&self) -> (f64, f64) {
        populations(self)
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &RealState) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn dot(&self, other: &RealState) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }
}

/// `(x1^2 + x2^2, x3^2 + x4^2)`.
pub fn populations(x: &RealState) -> (f64, f64) {
    let [x1, x2, x3, x4] = x.0;
    (x1 * x1 + x2 * x2, x3 * x3 + x4 * x4)
}

/// `(u1 F1 + u2 F2) x`, written out row by row.
pub fn rhs(x: &RealState, u1: f64, u2: f64) -> [f64; 4] {
    let [x1, x2, x3, x4] = x.0;
    [
        x4 * u1 + x3 * u2,
        -x3 * u1 + x4 * u2,
        x2 * u1 - x1 * u2,
        -x1 * u1 - x2 * u2,
    ]
}

/// Source of controls over `[0, T]`.
pub trait ControlLaw {
    fn horizon(&self) -> f64;

    fn controls(&self, t: f64) -> Result<Controls>;

    /// Wei-Norman coordinates behind the controls, when the law has them.
    fn coordinates(&self, _t: f64) -> Result<Option<BaseCoordinates>> {
        Ok(None)
    }
}

impl ControlLaw for FlatDesign {
    fn horizon(&self) -> f64 {
        FlatDesign::horizon(self)
    }

    fn controls(&self, t: f64) -> Result<Controls> {
        self.synthesize_controls(t)
    }

    fn coordinates(&self, t: f64) -> Result<Option<BaseCoordinates>> {
        FlatDesign::coordinates(self, t).map(Some)
    }
}

/// `u = 0` over `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroControl {
    pub horizon: f64,
}

impl ControlLaw for ZeroControl {
    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn controls(&self, _t: f64) -> Result<Controls> {
        Ok(Controls::default())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryNode {
    pub t: f64,
    pub coords: Option<BaseCoordinates>,
    pub controls: Controls,
    /// State produced by the path that built the trajectory.
    pub state: RealState,
    /// `Phi(t, 0) x0` from the closed form, when coordinates are known.
    pub closed_form: Option<RealState>,
    /// `| |x(t)| - |x0| |`.
    pub norm_err: f64,
}

impl TrajectoryNode {
    pub fn populations(&self) -> (f64, f64) {
        populations(&self.state)
    }
}

/// A uniformly sampled solution on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub nodes: Vec<TrajectoryNode>,
}

impl Trajectory {
    pub fn initial(&self) -> &TrajectoryNode {
        &self.nodes[0]
    }

    pub fn last(&self) -> &TrajectoryNode {
        self.nodes.last().expect("trajectory has at least two nodes")
    }

    pub fn final_state(&self) -> RealState {
        self.last().state
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.t)
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.nodes.iter().fold(0.0, |acc, n| acc.max(n.norm_err))
    }

    /// Largest `|x_path - x_closed_form|_inf` over nodes carrying both.
    pub fn max_oracle_mismatch(&self) -> Option<f64> {
        self.nodes
            .iter()
            .filter_map(|n| n.closed_form.map(|c| n.state.max_abs_diff(&c)))
            .reduce(f64::max)
    }
}

/// `t_k = k T / N` with the last node pinned to `T`.
pub fn uniform_grid(horizon: f64, steps: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=steps)
        .map(|k| horizon * k as f64 / steps as f64)
        .collect();
    grid[steps] = horizon;
    grid
}

/// One classical RK4 step of `y' = f(t, y)`.
pub fn rk4_step<const N: usize, F>(f: &mut F, t: f64, y: &[f64; N], h: f64) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let axpy = |a: &[f64; N], k: &[f64; N], s: f64| {
        let mut out = *a;
        out.iter_mut().zip(k).for_each(|(o, k)| *o += s * k);
        out
    };
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &axpy(y, &k1, 0.5 * h))?;
    let k3 = f(t + 0.5 * h, &axpy(y, &k2, 0.5 * h))?;
    let k4 = f(t + h, &axpy(y, &k3, h))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Integrates `y' = f(t, y)` over an arbitrary increasing grid, returning one value per node.
pub fn rk4_on_grid<const N: usize, F>(mut f: F, grid: &[f64], y0: [f64; N]) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut out = Vec::with_capacity(grid.len());
    let mut y = y0;
    out.push(y);
    for w in grid.windows(2) {
        y = rk4_step(&mut f, w[0], &y, w[1] - w[0])?;
        out.push(y);
    }
    Ok(out)
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("steps must be at least 2, got {steps}")));
    }
    Ok(())
}

fn check_unit(x0: &RealState) -> Result<()> {
    if !x0.0.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("initial state"));
    }
    if (x0.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "initial state must have unit norm, got {}",
            x0.norm()
        )));
    }
    Ok(())
}

/// Fixed-step RK4 on the bilinear state equation. The state is never renormalized.
pub fn integrate<L: ControlLaw + ?Sized>(law: &L, x0: RealState, steps: usize) -> Result<Trajectory> {
    check_steps(steps)?;
    check_unit(&x0)?;
    let grid = uniform_grid(law.horizon(), steps);
    let norm0 = x0.norm();

    let mut f = |t: f64, x: &[f64; 4]| -> Result<[f64; 4]> {
        let u = law.controls(t)?;
        Ok(rhs(&RealState(*x), u.u1, u.u2))
    };

    let mut nodes = Vec::with_capacity(grid.len());
    let mut x = x0.0;
    for (k, &t) in grid.iter().enumerate() {
        if k > 0 {
            let t_prev = grid[k - 1];
            x = rk4_step(&mut f, t_prev, &x, t - t_prev)?;
        }
        let state = RealState(x);
        let coords = law.coordinates(t)?;
        let closed_form = coords
            .map(|g| transition_matrix(&g).map(|phi| RealState(phi.mul_vec(&x0.0))))
            .transpose()?;
        nodes.push(TrajectoryNode {
            t,
            coords,
            controls: law.controls(t)?,
            state,
            closed_form,
            norm_err: (state.norm() - norm0).abs(),
        });
    }
    Ok(Trajectory { nodes })
}

/// `x(t) = exp(g1 F1) exp(g2 F2) exp(g3 F3) x0` at every node, no time stepping.
pub fn propagate_closed_form(design: &FlatDesign, x0: RealState, steps: usize) -> Result<Trajectory> {
    check_steps(steps)?;
    check_unit(&x0)?;
    let norm0 = x0.norm();
    let nodes = uniform_grid(design.horizon(), steps)
        .into_iter()
        .map(|t| {
            let sample = design.sample(t)?;
            let state = RealState(transition_matrix(&sample.coords)?.mul_vec(&x0.0));
            Ok(TrajectoryNode {
                t,
                coords: Some(sample.coords),
                controls: sample.controls,
                state,
                closed_form: Some(state),
                norm_err: (state.norm() - norm0).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { nodes })
}

/// RK4 on `Phi' = A(t) Phi`, `Phi(0) = I`, returning `Phi` at each node of `grid`.
pub fn propagate_transition<F>(mut generator: F, grid: &[f64]) -> Result<Vec<Matrix4>>
where
    F: FnMut(f64) -> Result<Matrix4>,
{
    let f = |t: f64, y: &[f64; 16]| -> Result<[f64; 16]> {
        let a = generator(t)?;
        Ok((a * Matrix4::from_array(y)).to_array())
    };
    Ok(rk4_on_grid(f, grid, Matrix4::IDENTITY.to_array())?
        .iter()
        .map(Matrix4::from_array)
        .collect())
}

/// `u1(t) F1 + u2(t) F2` for a control law.
pub fn control_generator<L: ControlLaw + ?Sized>(law: &L, t: f64) -> Result<Matrix4> {
    let u = law.controls(t)?;
    Ok(Generator::F1.matrix().scale(u.u1) + Generator::F2.matrix().scale(u.u2))
}

/// Energies of the two levels, with hbar = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLevels {
    pub e1: f64,
    pub e2: f64,
}

/// Lab-frame complex control `Omega(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabControl {
    pub t: f64,
    pub omega_re: f64,
    pub omega_im: f64,
}

impl LabControl {
    pub fn omega(&self) -> Complex64 {
        Complex64::new(self.omega_re, self.omega_im)
    }
}

/// `Omega(t) = exp(i (E2 - E1) t) (u1 + i u2)`.
pub fn to_lab_control(u1: f64, u2: f64, t: f64, levels: &EnergyLevels) -> LabControl {
    let phase = Complex64::from_polar(1.0, (levels.e2 - levels.e1) * t);
    let omega = phase * Complex64::new(u1, u2);
    LabControl {
        t,
        omega_re: omega.re,
        omega_im: omega.im,
    }
}

/// Inverse of [`to_lab_control`]: `u = exp(-i (E2 - E1) t) Omega`.
pub fn from_lab_control(lab: &LabControl, levels: &EnergyLevels) -> Controls {
    let phase = Complex64::from_polar(1.0, -(levels.e2 - levels.e1) * lab.t);
    let u = phase * lab.omega();
    Controls { u1: u.re, u2: u.im }
}

/// `psi~ = diag(exp(-i E1 t), exp(-i E2 t)) (x1 + i x2, x3 + i x4)`.
pub fn to_lab_state(x: &RealState, t: f64, levels: &EnergyLevels) -> [Complex64; 2] {
    let [x1, x2, x3, x4] = x.0;
    [
        Complex64::from_polar(1.0, -levels.e1 * t) * Complex64::new(x1, x2),
        Complex64::from_polar(1.0, -levels.e2 * t) * Complex64::new(x3, x4),
    ]
}
