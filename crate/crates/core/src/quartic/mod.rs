//! Plane quartic reconstruction from a period matrix and the hyperflex forms.

mod hyperflex;
mod omega;
mod poly;
mod psi;
mod reconstruct;

pub use hyperflex::*;
pub use omega::*;
pub use poly::*;
pub use psi::*;
pub use reconstruct::*;
