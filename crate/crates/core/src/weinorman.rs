//! Wei-Norman coefficient matrix.
//!
//! Differentiating `Phi = exp(g1 F1) exp(g2 F2) exp(g3 F3)` and moving every
//! generator to the left with the adjoint action gives
//! `dPhi/dt = (f1 F1 + f2 F2 + f3 F3) Phi` with `f = W(g1, g2) * g'`.
//! Matching against `u1 F1 + u2 F2` yields `W g' = (u1, u2, 0)`.

use std::ops::{Index, Mul};

use crate::algebra::{BaseCoordinates, Generator, Matrix4};
use crate::error::{Error, Result};

/// Default threshold on `|cos 2g2|` below which the coefficient matrix is treated as singular.
pub const SINGULARITY_EPS: f64 = 1e-10;

/// 3x3 matrix relating base-function rates to the generator coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WnMatrix(pub [[f64; 3]; 3]);

impl WnMatrix {
    pub const IDENTITY: WnMatrix = WnMatrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (o, row) in out.iter_mut().zip(self.0.iter()) {
            *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        }
        out
    }

    pub fn max_abs_diff(&self, other: &WnMatrix) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

impl Index<(usize, usize)> for WnMatrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.0[r][c]
    }
}

impl Mul for WnMatrix {
    type Output = WnMatrix;
    fn mul(self, rhs: WnMatrix) -> WnMatrix {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        WnMatrix(out)
    }
}

/// Coefficients of `F1, F2, F3` in `dPhi/dt * Phi^-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WnCoefficients {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

impl WnCoefficients {
    /// The generator `f1 F1 + f2 F2 + f3 F3`.
    pub fn generator(&self) -> Matrix4 {
        Generator::F1.matrix().scale(self.f1)
            + Generator::F2.matrix().scale(self.f2)
            + Generator::F3.matrix().scale(self.f3)
    }
}

pub fn wn_matrix(g1: f64, g2: f64) -> WnMatrix {
    let (s1, c1) = (2.0 * g1).sin_cos();
    let (s2, c2) = (2.0 * g2).sin_cos();
    WnMatrix([
        [1.0, 0.0, s2],
        [0.0, c1, -c2 * s1],
        [0.0, s1, c2 * c1],
    ])
}

/// Explicit inverse of [`wn_matrix`], guarded by [`SINGULARITY_EPS`].
pub fn wn_inverse(g1: f64, g2: f64) -> Result<WnMatrix> {
    wn_inverse_with_threshold(g1, g2, SINGULARITY_EPS)
}

pub fn wn_inverse_with_threshold(g1: f64, g2: f64, eps: f64) -> Result<WnMatrix> {
    let (s1, c1) = (2.0 * g1).sin_cos();
    let (s2, c2) = (2.0 * g2).sin_cos();
    if c2.is_nan() || c2.abs() <= eps {
        return Err(Error::SingularCoordinates { cos_2g2: c2.abs() });
    }
    // First row: (c2, s1 s2, -c1 s2) / c2. Inverting W directly fixes the signs.
    Ok(WnMatrix([
        [1.0, s1 * s2 / c2, -c1 * s2 / c2],
        [0.0, c1, s1],
        [0.0, -s1 / c2, c1 / c2],
    ]))
}

/// Base-function rates produced by the controls: `g' = W^-1 (u1, u2, 0)`.
pub fn gdot_from_controls(g: &BaseCoordinates, u1: f64, u2: f64) -> Result<[f64; 3]> {
    let inv = wn_inverse(g.g1, g.g2)?;
    Ok(inv.mul_vec([u1, u2, 0.0]))
}

/// `f1 = g1' + g3' sin 2g2`, `f2 = g2' cos 2g1 - g3' cos 2g2 sin 2g1`,
/// `f3 = g2' sin 2g1 + g3' cos 2g2 cos 2g1`.
pub fn cbh_coefficients(g: &BaseCoordinates) -> Result<WnCoefficients> {
    let rates = g
        .rates
        .ok_or(Error::InvalidArgument("base coordinates carry no derivatives".into()))?;
    if !g.is_finite() {
        return Err(Error::NonFinite("base coordinates"));
    }
    let (s1, c1) = (2.0 * g.g1).sin_cos();
    let (s2, c2) = (2.0 * g.g2).sin_cos();
    Ok(WnCoefficients {
        f1: rates.dg1 + rates.dg3 * s2,
        f2: rates.dg2 * c1 - rates.dg3 * c2 * s1,
        f3: rates.dg2 * s1 + rates.dg3 * c2 * c1,
    })
}
