//! Numerical building blocks: extended-precision reals, quadrature, dense
//! linear algebra and compensated summation.

pub mod bigreal;
pub mod hpquad;
pub mod linalg;
pub mod quadrature;
pub mod sum;

pub use bigreal::{BigComplex, BigCtx, BigReal};
pub use linalg::{condition_estimate, solve_dense, DenseSolution};
pub use quadrature::{integrate, l2_norm, weighted_l2_norm, Domain, QuadValue, QuadratureConfig, Span};
pub use sum::NeumaierSum;
