//! Genus-three theta constants, the hyperflex and Clebsch modular forms, and the
//! boundary order calculus that computes their divisor classes.

pub mod boundary;
pub mod catalecticant;
pub mod chars;
pub mod error;
pub mod quartic;
pub mod rational;
pub mod theta;

pub use error::{Error, Result};

/// Version of this library, recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
