//! Construction and numerical verification of SU(2)-equivariant
//! Einstein-Hermitian harmonic maps from the Riemann sphere into real
//! Grassmannians.

pub mod contraction;
pub mod endo;
pub mod exact;
pub mod gauss;
pub mod geometry;
pub mod error;
pub mod linalg;
pub mod moduli;
pub mod quadrature;
pub mod realform;
pub mod rep;
pub mod span;
pub mod tensor;

pub use error::{Error, Result};
