//! Simulation and numerical solution of the balls-in-bins process with
//! feedback.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod ctmc;
pub mod discrete;
pub mod error;
pub mod feedback;
pub mod master;
pub mod rng;
pub mod sampler;
pub mod tail;

pub use error::{Error, Result};
pub use feedback::{ExplosionBounds, FeedbackFunction, RegimeLabel};
pub use tail::{TailCurve, TailSource};
