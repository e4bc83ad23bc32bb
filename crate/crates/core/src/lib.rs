//! Ball-basis calculus on finite weighted spaces: ball-bases and their
//! axioms, kernel structures, maximal operators, oscillation functionals and
//! BMO/BLO norms, plus an experiment harness and CLI.
//!
//! Everything numeric is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the aliases below fix the scalar for the common cases.

pub mod basis;
pub mod error;
pub mod functional;
pub mod kernel;
pub mod maximal;
pub mod scalar;
pub mod space;
pub mod verify;

pub use error::{Error, Result};

pub type Space = space::MeasureSpace<f64>;
pub type Field = space::ScalarField<f64>;
pub type Basis = basis::BallBasis<f64>;
pub type Kernels = kernel::KernelStructure<f64>;
pub type Space32 = space::MeasureSpace<f32>;
pub type Field32 = space::ScalarField<f32>;
pub type Basis32 = basis::BallBasis<f32>;
pub type Kernels32 = kernel::KernelStructure<f32>;
