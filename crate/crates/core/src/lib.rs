//! Approximation of square-integrable functions by finite sums of translates
//! of a single Gaussian `e^{-x²}`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! processes or the terminal lives in the `gausskit` companion crate.
//!
//! Pipelines:
//!
//! * [`hermite`]: derivative-of-Gaussian expansion coefficients `b_n`.
//! * [`gaussfit`]: conversion of `b_n` into translate weights `a_n` through
//!   backward differences, plus the impulse-train view of the result.
//! * [`lsq`]: the continuous least-squares alternative, solved in extended
//!   precision.
//! * [`lowfreq`]: low-frequency trigonometric sums under a Gaussian weight.
//! * [`stencil`]: general finite-difference stencils.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod funcspec;
pub mod gaussfit;
pub mod hermite;
pub mod lowfreq;
pub mod lsq;
pub mod numerics;
pub mod stencil;

pub use error::{Error, Result};
pub use funcspec::TargetFunction;
pub use gaussfit::{GaussianCombination, ImpulseTrain};
pub use hermite::HermiteCoefficients;
pub use lowfreq::{GridFunction, TrigCombination};
pub use lsq::NormalSystem;
pub use numerics::{BigReal, QuadratureConfig};
pub use stencil::Stencil;
