//! Polarization measurement for distributions of policy positions on a
//! bounded scale: a partial order around a center, a scalar index consistent
//! with it, an affective aggregate, and a salience mixture model.

// Negated comparisons reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affective;
pub mod distribution;
pub mod error;
pub mod order;
pub mod report;
pub mod salience;
pub mod survey;
pub mod verify;

pub use error::{Error, Result};
