//! Vanishing orders of theta expressions along the boundary, and the divisor
//! classes they determine.

mod banana;
mod classes;
mod expr;
mod families;
mod orders;

pub use banana::*;
pub use classes::*;
pub use expr::*;
pub use families::*;
pub use orders::*;
