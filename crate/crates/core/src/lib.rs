//! Explicit variational time integrators for systems of translating and
//! rotating spherical bodies, with rotations parametrized by rescaled
//! Rodrigues vectors.
//!
//! The crate is organized around five pieces:
//!
//! * [`rotations`] — exact algebra of rescaled Rodrigues vectors:
//!   reconstruction of the rotation matrix, composition, relative rotation,
//!   and the rotation angle metric. No trigonometry appears in the hot path
//!   and no reprojection is ever needed.
//! * [`dynamics`] — the three explicit steppers (`Vti1`, `Vti2`, `Vti3`)
//!   acting on a [`dynamics::SystemState`] driven by a pluggable
//!   [`dynamics::PotentialModel`], plus the simulation driver.
//! * [`models`] — the concrete potentials: a gravity pendulum on SO(3) and a
//!   particle-binder bond network with Hertz-type contact and an optional
//!   rigid wall, including the torus scenario builder.
//! * [`diagnostics`] — energy ledger, momentum maps, trajectory norms,
//!   relative error measures and the convergence-order harness.
//! * [`checks`] — self-contained verification suites (rotation oracles,
//!   finite-difference force/moment consistency, reversibility, momentum
//!   conservation) shared by the test suite and the CLI.

pub mod checks;
pub mod diagnostics;
pub mod dynamics;
mod error;
pub mod models;
pub mod rotations;

pub use error::Error;
pub use rotations::{Mat3, RodriguesVector, RotationMatrix, Vec3};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
