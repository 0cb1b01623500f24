//! Catalecticant matrices of plane quartics and the Clebsch modular form.

mod class;
mod numeric;
mod symbolic;

pub use class::*;
pub use numeric::*;
pub use symbolic::*;
