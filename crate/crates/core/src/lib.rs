//! Closed-form solution machinery for the wave equation on de Sitter space,
//!
//! ```text
//! u_tt - e^{2t} Δu = f,
//! ```
//!
//! with wave speed `e^t`. The crate evaluates the fundamental solution, the
//! Riemann function and the Cauchy kernels `K0`, `K1`, and assembles them into
//! solvers for the one dimensional problem and for `n = 2, 3` through
//! spherical means. A leapfrog finite-difference solver is included as an
//! independent reference.
//!
//! The crate builds without `std` (with `alloc`) when the default `std`
//! feature is replaced by `libm`. File formats, fractional operators and
//! the command line live in the `desitter` crate.
#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("enable the `std` feature or, without std, the `libm` feature");

pub mod data;
pub mod error;
pub mod fd;
pub mod field;
pub mod identities;
pub mod kernels;
pub mod quad;
pub mod solver_1d;
pub mod solver_nd;
pub mod special;

pub use error::{Error, Result};
