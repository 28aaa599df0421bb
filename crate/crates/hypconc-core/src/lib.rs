//! Numerics for sharp concentration inequalities in weighted Bergman spaces
//! on the unit disk, their stability theory, and the half-plane, Fock and
//! Hardy regimes attached to them.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! randomized experiment drivers live in the `hypconc` crate.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod asymptotics;
pub mod bergman;
pub mod concentration;
mod error;
pub mod hyperbolic;
pub mod limits;
pub mod linalg;
pub mod optimize;
pub mod quadrature;
pub mod specfun;
pub mod stability;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use specfun::AlphaParam;
