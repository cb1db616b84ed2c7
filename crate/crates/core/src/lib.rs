//! Take-off assessment for rigid-wing airborne wind energy systems.
//!
//! Three take-off concepts (vertical, rotational and linear) are sized
//! with static models and compared through power, mass and ground-area
//! criteria. The linear take-off is additionally simulated with a hybrid
//! dynamical model of winch, slide and aircraft under feedback control.

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aero;
pub mod commands;
pub mod concept;
pub mod control;
pub mod criteria;
pub mod crosswind;
pub mod dynamics;
pub mod error;
pub mod linear;
pub mod propeller;
pub mod rotational;
pub mod scenario;
pub mod sim;
pub mod vertical;

pub use concept::{ConceptAssessment, ConceptRegistry, TakeoffConcept};
pub use crosswind::{Aircraft, Environment};
pub use error::{Error, Result};
pub use scenario::Scenario;
