//! Numerical laboratory for the damped sine-Gordon equation with a small
//! viscous term `eps u_xxt` on a Neumann interval, and for its hyperbolic
//! limit `eps = 0`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimates;
pub mod exact;
pub mod params;
pub mod pde;
pub mod spectral_kernel;

pub use error::{Error, Result};
pub use params::{MemoryParams, ModelParams};
