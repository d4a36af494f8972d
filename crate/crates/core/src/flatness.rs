//! Flat-output parametrization.
//!
//! The pair `(g2, g3)` is chosen freely. `g1` then follows algebraically from the
//! binding condition `g2' sin 2g1 + g3' cos 2g2 cos 2g1 = 0` and the controls from
//! pointwise formulas in `g`, `g'` and `g''`. Nothing in this module integrates in time.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::algebra::BaseCoordinates;
use crate::error::{Error, Result};

/// Residual allowed between `u2` and the `F2` coefficient of the Wei-Norman expansion.
pub const BRANCH_RESIDUAL_TOL: f64 = 1e-9;

/// Number of uniform samples used when checking a design's invariants on `[0, T]`.
const INVARIANT_SAMPLES: usize = 4000;

/// A smooth scalar function on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub enum ParameterProfile {
    /// `start + (end - start) t / T`.
    Linear { start: f64, end: f64, horizon: f64 },
    /// `start + (end - start)(3 s^2 - 2 s^3)` with `s = t / T`; zero slope at both ends.
    CubicHermite { start: f64, end: f64, horizon: f64 },
    /// `sum_k c_k s^k` with `s = t / T`.
    Polynomial { coeffs: Vec<f64>, horizon: f64 },
}

impl ParameterProfile {
    pub fn linear(start: f64, end: f64, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        check_finite(&[start, end])?;
        Ok(ParameterProfile::Linear { start, end, horizon })
    }

    pub fn cubic_hermite(start: f64, end: f64, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        check_finite(&[start, end])?;
        Ok(ParameterProfile::CubicHermite { start, end, horizon })
    }

    pub fn polynomial(coeffs: Vec<f64>, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        check_finite(&coeffs)?;
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("polynomial profile needs at least one coefficient".into()));
        }
        Ok(ParameterProfile::Polynomial { coeffs, horizon })
    }

    pub fn constant(value: f64, horizon: f64) -> Result<Self> {
        Self::polynomial(vec![value], horizon)
    }

    /// `4 a s (1 - s)`: zero at both ends, peak `a` at `T / 2`.
    pub fn arch(amplitude: f64, horizon: f64) -> Result<Self> {
        Self::polynomial(vec![0.0, 4.0 * amplitude, -4.0 * amplitude], horizon)
    }

    pub fn horizon(&self) -> f64 {
        match self {
            ParameterProfile::Linear { horizon, .. }
            | ParameterProfile::CubicHermite { horizon, .. }
            | ParameterProfile::Polynomial { horizon, .. } => *horizon,
        }
    }

    /// Value, first and second time derivative at `t`.
    pub fn eval(&self, t: f64) -> [f64; 3] {
        let horizon = self.horizon();
        let s = t / horizon;
        match self {
            ParameterProfile::Linear { start, end, .. } => {
                let delta = end - start;
                [start + delta * s, delta / horizon, 0.0]
            }
            ParameterProfile::CubicHermite { start, end, .. } => {
                let delta = end - start;
                [
                    start + delta * (3.0 * s * s - 2.0 * s * s * s),
                    delta * 6.0 * s * (1.0 - s) / horizon,
                    delta * (6.0 - 12.0 * s) / (horizon * horizon),
                ]
            }
            ParameterProfile::Polynomial { coeffs, .. } => {
                // Horner for p, p', p'' simultaneously
                let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
                for &c in coeffs.iter().rev() {
                    ddp = ddp * s + 2.0 * dp;
                    dp = dp * s + p;
                    p = p * s + c;
                }
                [p, dp / horizon, ddp / (horizon * horizon)]
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t)[0]
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.eval(t)[1]
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        self.eval(t)[2]
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("horizon must be positive and finite, got {horizon}")))
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("profile coefficients"))
    }
}

/// `g2(t) = (pi / 2) t / T`.
pub fn make_linear_g2(horizon: f64) -> Result<ParameterProfile> {
    ParameterProfile::linear(0.0, FRAC_PI_2, horizon)
}

/// `g3(t) = gamma (3 (t/T)^2 - 2 (t/T)^3)`.
pub fn make_cubic_g3(gamma: f64, horizon: f64) -> Result<ParameterProfile> {
    ParameterProfile::cubic_hermite(0.0, gamma, horizon)
}

/// Which solution of the binding condition is taken for `g1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum G1Branch {
    /// `g1 = (1/2) arctan(-cos 2g2 g3' / g2')`, range `(-pi/4, pi/4)`. Requires `g2' != 0`.
    #[default]
    Principal,
    /// `2 g1` is the angle of `(g2', -g3' cos 2g2)` taken in `(-pi/2, 3pi/2]`.
    /// Agrees with `Principal` wherever `g2' > 0` and lets `g2'` change sign,
    /// which designs ending at `g2(T) = g2(0)` need.
    Extended,
}

/// Interaction-frame controls `u = u1 + i u2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Controls {
    pub u1: f64,
    pub u2: f64,
}

/// Everything the flat parametrization yields at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignSample {
    pub t: f64,
    pub coords: BaseCoordinates,
    pub controls: Controls,
}

/// The flat outputs `(g2, g3)` over a common horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatDesign {
    g2: ParameterProfile,
    g3: ParameterProfile,
    horizon: f64,
    branch: G1Branch,
}

impl FlatDesign {
    /// Builds a design with the principal `g1` branch.
    pub fn new(g2: ParameterProfile, g3: ParameterProfile) -> Result<Self> {
        Self::with_branch(g2, g3, G1Branch::Principal)
    }

    pub fn with_branch(g2: ParameterProfile, g3: ParameterProfile, branch: G1Branch) -> Result<Self> {
        let horizon = g2.horizon();
        if (g3.horizon() - horizon).abs() > 1e-12 * horizon {
            return Err(Error::InvalidArgument("g2 and g3 profiles have different horizons".into()));
        }
        let design = FlatDesign { g2, g3, horizon, branch };
        design.check_invariants()?;
        Ok(design)
    }

    pub fn g2_profile(&self) -> &ParameterProfile {
        &self.g2
    }

    pub fn g3_profile(&self) -> &ParameterProfile {
        &self.g3
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn branch(&self) -> G1Branch {
        self.branch
    }

    fn check_invariants(&self) -> Result<()> {
        let t_end = self.horizon;
        let slope_scale = 1.0 + self.g3.value(t_end).abs().max(self.g3.value(0.0).abs()) / t_end;
        for t in [0.0, t_end] {
            if self.g3.derivative(t).abs() > 1e-12 * slope_scale {
                return Err(Error::DegenerateProfile {
                    t,
                    reason: "g3 must have zero slope at both ends so that g1(0) = g1(T) = 0",
                });
            }
        }
        let mut prev: Option<(f64, f64)> = None;
        for k in 1..INVARIANT_SAMPLES {
            let t = t_end * k as f64 / INVARIANT_SAMPLES as f64;
            let (x, y) = self.binding_vector(t)?;
            if let Some((px, py)) = prev {
                let flipped = x * px < 0.0;
                let crossed = match self.branch {
                    G1Branch::Principal => flipped,
                    G1Branch::Extended => flipped && (y < 0.0 || py < 0.0),
                };
                if crossed {
                    return Err(Error::DegenerateProfile {
                        t,
                        reason: "g2' changes sign where g1 cannot follow continuously",
                    });
                }
            }
            prev = Some((x, y));
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let slack = 1e-9 * self.horizon;
        if !t.is_finite() {
            return Err(Error::NonFinite("time"));
        }
        if t < -slack || t > self.horizon + slack {
            return Err(Error::InvalidArgument(format!(
                "t = {t} outside [0, {}]",
                self.horizon
            )));
        }
        Ok(())
    }

    /// `(g2', -g3' cos 2g2)`, whose angle is `2 g1`, validated for the active branch.
    fn binding_vector(&self, t: f64) -> Result<(f64, f64)> {
        let [g2, dg2, _] = self.g2.eval(t);
        let dg3 = self.g3.derivative(t);
        let x = dg2;
        let y = -dg3 * (2.0 * g2).cos();
        match self.branch {
            G1Branch::Principal if x == 0.0 => Err(Error::DegenerateProfile {
                t,
                reason: "g2' vanishes, arctan recovery of g1 is undefined",
            }),
            G1Branch::Extended if x == 0.0 && y <= 0.0 => Err(Error::DegenerateProfile {
                t,
                reason: "binding direction is zero or on the branch cut",
            }),
            _ => Ok((x, y)),
        }
    }

    /// The dependent base function `g1(t)`.
    pub fn recover_g1(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let (x, y) = self.binding_vector(t)?;
        Ok(match self.branch {
            G1Branch::Principal => 0.5 * (y / x).atan(),
            G1Branch::Extended => {
                let mut angle = y.atan2(x);
                if angle <= -FRAC_PI_2 {
                    angle += 2.0 * PI;
                }
                0.5 * angle
            }
        })
    }

    /// Analytic `g1'(t)`: half the rate of change of the angle of `(x, y) = (g2', -g3' cos 2g2)`,
    /// i.e. `(x y' - y x') / (2 (x^2 + y^2))`.
    pub fn g1_dot(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let (x, y) = self.binding_vector(t)?;
        let [g2, dg2, ddg2] = self.g2.eval(t);
        let [_, dg3, ddg3] = self.g3.eval(t);
        let (s2, c2) = (2.0 * g2).sin_cos();
        let dx = ddg2;
        let dy = -ddg3 * c2 + 2.0 * dg3 * dg2 * s2;
        Ok(0.5 * (x * dy - y * dx) / (x * x + y * y))
    }

    /// Base coordinates with their rates at `t`.
    pub fn coordinates(&self, t: f64) -> Result<BaseCoordinates> {
        let g1 = self.recover_g1(t)?;
        let dg1 = self.g1_dot(t)?;
        let [g2, dg2, _] = self.g2.eval(t);
        let [g3, dg3, _] = self.g3.eval(t);
        Ok(BaseCoordinates::with_rates(g1, g2, g3, dg1, dg2, dg3))
    }

    /// `u1 = g1' + g3' sin 2g2`, `u2 = sqrt(g2'^2 + g3'^2 cos^2 2g2)`.
    pub fn synthesize_controls(&self, t: f64) -> Result<Controls> {
        Ok(self.sample(t)?.controls)
    }

    pub fn sample(&self, t: f64) -> Result<DesignSample> {
        let coords = self.coordinates(t)?;
        let rates = coords.rates.expect("coordinates() always fills rates");
        let (s2, c2) = (2.0 * coords.g2).sin_cos();
        let u1 = rates.dg1 + rates.dg3 * s2;
        let u2 = rates.dg2.hypot(rates.dg3 * c2);

        let (s1, c1) = (2.0 * coords.g1).sin_cos();
        let f2 = rates.dg2 * c1 - rates.dg3 * c2 * s1;
        let residual = (u2 - f2).abs();
        if residual > BRANCH_RESIDUAL_TOL {
            return Err(Error::BranchInconsistency { t, residual });
        }
        Ok(DesignSample {
            t,
            coords,
            controls: Controls { u1, u2 },
        })
    }
}
