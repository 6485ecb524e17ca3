//! Decay audits, kernel bound audits, fractional powers of the Laplacian,
//! and the file formats behind the `desitter` command line.

pub mod bounds;
pub mod compare;
pub mod decay;
pub mod error;
pub mod fractional;
pub mod io;
pub mod run;
pub mod spec;

pub use error::{Error, Result};
