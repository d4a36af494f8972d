//! Generator matrices of the real four-dimensional qubit model, their Lie brackets,
//! and the ordered product of one-parameter exponentials
//! `Phi = exp(g1 F1) exp(g2 F2) exp(g3 F3)`.
//!
//! Every generator squares to `-I`, so each exponential is evaluated in closed form
//! as `cos(g) I + sin(g) F`. No series summation happens outside of tests.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Dense real 4x4 matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix4(pub [[f64; 4]; 4]);

impl Matrix4 {
    pub const ZERO: Matrix4 = Matrix4([[0.0; 4]; 4]);
    pub const IDENTITY: Matrix4 = Matrix4([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]);

    pub fn from_rows(rows: [[f64; 4]; 4]) -> Self {
        Matrix4(rows)
    }

    pub fn rows(&self) -> &[[f64; 4]; 4] {
        &self.0
    }

    pub fn scale(&self, k: f64) -> Matrix4 {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|v| *v *= k);
        out
    }

    pub fn transpose(&self) -> Matrix4 {
        let mut out = Matrix4::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                out.0[j][i] = self.0[i][j];
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (o, row) in out.iter_mut().zip(self.0.iter()) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        let minor = |skip: usize| -> f64 {
            let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
            let a = |r: usize, c: usize| m[r][cols[c]];
            a(1, 0) * (a(2, 1) * a(3, 2) - a(2, 2) * a(3, 1))
                - a(1, 1) * (a(2, 0) * a(3, 2) - a(2, 2) * a(3, 0))
                + a(1, 2) * (a(2, 0) * a(3, 1) - a(2, 1) * a(3, 0))
        };
        (0..4)
            .map(|c| {
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * minor(c)
            })
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix4) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    /// Entrywise comparison with an absolute tolerance.
    pub fn approx_eq(&self, other: &Matrix4, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Flattened row-major copy, handy for feeding an ODE integrator.
    pub fn to_array(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for (i, v) in self.0.iter().flatten().enumerate() {
            out[i] = *v;
        }
        out
    }

    pub fn from_array(a: &[f64; 16]) -> Matrix4 {
        let mut out = Matrix4::ZERO;
        for (i, v) in a.iter().enumerate() {
            out.0[i / 4][i % 4] = *v;
        }
        out
    }
}

impl fmt::Debug for Matrix4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix4[")?;
        for row in &self.0 {
            writeln!(f, "  {:?}", row)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix4 {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.0[r][c]
    }
}

impl IndexMut<(usize, usize)> for Matrix4 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.0[r][c]
    }
}

impl Add for Matrix4 {
    type Output = Matrix4;
    fn add(mut self, rhs: Matrix4) -> Matrix4 {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl Sub for Matrix4 {
    type Output = Matrix4;
    fn sub(mut self, rhs: Matrix4) -> Matrix4 {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Matrix4 {
    type Output = Matrix4;
    fn neg(self) -> Matrix4 {
        self.scale(-1.0)
    }
}

impl Mul for Matrix4 {
    type Output = Matrix4;
    fn mul(self, rhs: Matrix4) -> Matrix4 {
        let mut out = Matrix4::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }
}

/// One of the three generators spanning the control Lie algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    F1,
    F2,
    F3,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::F1, Generator::F2, Generator::F3];

    /// 1-based lookup.
    pub fn from_index(i: usize) -> Result<Generator> {
        match i {
            1 => Ok(Generator::F1),
            2 => Ok(Generator::F2),
            3 => Ok(Generator::F3),
            _ => Err(Error::IndexOutOfRange(i)),
        }
    }

    pub fn matrix(self) -> Matrix4 {
        match self {
            // x1' = x4 u1 + x3 u2, x2' = -x3 u1 + x4 u2, ...
            Generator::F1 => Matrix4([
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0, 0.0],
            ]),
            Generator::F2 => Matrix4([
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [-1.0, 0.0, 0.0, 0.0],
                [0.0, -1.0, 0.0, 0.0],
            ]),
            // [F1, F2] / 2
            Generator::F3 => Matrix4([
                [0.0, -1.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0, 0.0],
            ]),
        }
    }
}

/// The fixed basis `F1, F2, F3` together with the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorBasis {
    pub f1: Matrix4,
    pub f2: Matrix4,
    pub f3: Matrix4,
    pub identity: Matrix4,
}

impl GeneratorBasis {
    pub fn new() -> Self {
        GeneratorBasis {
            f1: Generator::F1.matrix(),
            f2: Generator::F2.matrix(),
            f3: Generator::F3.matrix(),
            identity: Matrix4::IDENTITY,
        }
    }

    pub fn get(&self, g: Generator) -> &Matrix4 {
        match g {
            Generator::F1 => &self.f1,
            Generator::F2 => &self.f2,
            Generator::F3 => &self.f3,
        }
    }

    /// Structure constants: `[Fi, Fj] = 2 eps_ijk Fk`, returned as `(sign, k)`.
    /// `None` when `i == j`.
    pub fn bracket(a: Generator, b: Generator) -> Option<(f64, Generator)> {
        use Generator::*;
        match (a, b) {
            (F1, F2) => Some((2.0, F3)),
            (F2, F3) => Some((2.0, F1)),
            (F3, F1) => Some((2.0, F2)),
            (F2, F1) => Some((-2.0, F3)),
            (F3, F2) => Some((-2.0, F1)),
            (F1, F3) => Some((-2.0, F2)),
            _ => None,
        }
    }
}

impl Default for GeneratorBasis {
    fn default() -> Self {
        Self::new()
    }
}

/// Wei-Norman base functions `(g1, g2, g3)`, optionally with their time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseCoordinates {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub rates: Option<BaseRates>,
}

/// Time derivatives of the base functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseRates {
    pub dg1: f64,
    pub dg2: f64,
    pub dg3: f64,
}

impl BaseRates {
    pub fn as_array(&self) -> [f64; 3] {
        [self.dg1, self.dg2, self.dg3]
    }
}

impl BaseCoordinates {
    pub fn new(g1: f64, g2: f64, g3: f64) -> Self {
        BaseCoordinates { g1, g2, g3, rates: None }
    }

    pub fn with_rates(g1: f64, g2: f64, g3: f64, dg1: f64, dg2: f64, dg3: f64) -> Self {
        BaseCoordinates {
            g1,
            g2,
            g3,
            rates: Some(BaseRates { dg1, dg2, dg3 }),
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.g1, self.g2, self.g3]
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
            && self
                .rates
                .is_none_or(|r| r.as_array().iter().all(|v| v.is_finite()))
    }
}

/// Returns the generator `F_i` for `i` in `1..=3`.
pub fn generator(i: usize) -> Result<Matrix4> {
    Generator::from_index(i).map(Generator::matrix)
}

pub fn commutator(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    *a * *b - *b * *a
}

/// `exp(g F_i) = cos(g) I + sin(g) F_i`.
pub fn exp_generator(i: usize, g: f64) -> Result<Matrix4> {
    let gen = Generator::from_index(i)?;
    if !g.is_finite() {
        return Err(Error::NonFinite("exponent"));
    }
    Ok(exp_of(gen, g))
}

fn exp_of(gen: Generator, g: f64) -> Matrix4 {
    let (s, c) = g.sin_cos();
    Matrix4::IDENTITY.scale(c) + gen.matrix().scale(s)
}

/// State transition matrix `exp(g1 F1) exp(g2 F2) exp(g3 F3)`.
pub fn transition_matrix(g: &BaseCoordinates) -> Result<Matrix4> {
    if !g.as_array().iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("base coordinates"));
    }
    Ok(exp_of(Generator::F1, g.g1) * exp_of(Generator::F2, g.g2) * exp_of(Generator::F3, g.g3))
}
