//! Hypothesis checker for boundedness and absence tests of compact integral
//! manifolds of polynomial differential systems.
//!
//! The crate is layered bottom-up:
//!
//! - [`ring`]: exact rational polynomials, fractions, radicals and power factors
//! - [`exterior`]: differential forms, vector fields and operators
//! - [`systems`]: the system classes and their induced constructions
//! - [`sign`]: domains and the sign-certificate engine
//! - [`theorems`]: one checker per test, each producing a [`theorems::CheckReport`]
//! - [`manifest`]: the text format, report rendering and the numeric probe

pub mod error;
pub mod exterior;
pub mod manifest;
pub mod par;
pub mod ring;
pub mod sign;
pub mod systems;
pub mod theorems;

pub use error::{Error, Result};

/// Seed used by the sampler unless overridden.
pub const DEFAULT_SEED: u64 = 42;

/// Renders a double with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
