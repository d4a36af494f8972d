//! Open-loop population transfer for a driven two-level system.
//!
//! The qubit is written as a real four-dimensional bilinear system
//! `x' = (u1 F1 + u2 F2) x`. Its transition matrix is factored as
//! `exp(g1 F1) exp(g2 F2) exp(g3 F3)`; choosing `g2` and `g3` freely fixes `g1`
//! and the controls algebraically. A design is checked by integrating the state
//! equation independently and comparing with the closed form.
//!
//! Module map:
//! - [`algebra`]: generators, brackets, closed-form exponentials
//! - [`weinorman`]: coefficient matrix linking `g'` to `(u1, u2, 0)`
//! - [`flatness`]: parameter profiles, `g1` recovery, control synthesis
//! - [`transfer`]: initial/target states, endpoint branches, verification
//! - [`dynamics`]: RK4 and closed-form propagation, lab-frame conversion
//! - [`cli`]: scenario files, CSV/SVG output, command pipeline

pub mod algebra;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod flatness;
pub mod transfer;
pub mod weinorman;

pub use algebra::{BaseCoordinates, BaseRates, Generator, GeneratorBasis, Matrix4};
pub use dynamics::{ControlLaw, EnergyLevels, RealState, Trajectory, TrajectoryNode, ZeroControl};
pub use error::{Error, Result};
pub use flatness::{Controls, FlatDesign, G1Branch, ParameterProfile};
pub use transfer::{Branch, BoundaryTargets, TransferSpec, VerificationReport};
pub use weinorman::{WnCoefficients, WnMatrix};
