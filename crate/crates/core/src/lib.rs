//! Root densities of integer polynomials modulo prime powers, discriminant
//! factors, and majorants for short sums of multiplicative functions over
//! polynomial values, together with direct evaluation of those sums.

pub mod arith;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod harness;
pub mod lhs;
mod modp;
pub mod rootcount;
pub mod scalar;
pub mod mfunc;
pub mod polyarith;

pub use error::{Error, Result};
pub use polyarith::{FactoredSystem, IntPoly};
