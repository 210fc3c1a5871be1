//! Exterior differential calculus over [`crate::ring`] coefficients.

mod field;
mod form;
mod potential;

pub use field::{DiffOperator, Sample, VectorField};
pub use form::{solve_for, KForm};
pub use potential::potential;

use std::collections::BTreeMap;

/// Variable index mapped to the 1-form replacing its differential.
pub type Substitution = BTreeMap<usize, KForm>;
