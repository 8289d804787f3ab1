//! Numerical evaluators for the 1-level density of the family of
//! non-principal Dirichlet L-functions to a prime modulus `q`.
//!
//! The density is computed three ways: directly from located zeros
//! ([`density::empirical_density`]), through the explicit formula
//! ([`density::explicit_formula_density`]) and from the ratios conjecture
//! ([`ratios::ratios_density_prediction`]).

pub mod arith;
pub mod characters;
pub mod density;
pub mod lfunc;
pub mod ratios;
pub mod special;
pub mod testfn;

mod error;

pub use error::{Error, ErrorKind};
pub use special::Complex;
