//! Numerical building blocks: quadrature, monotone root finding, exact
//! rationals and the small amount of statistics the experiments need.

pub mod mc;
pub mod quad;
pub mod rational;
pub mod root;
pub mod stats;
