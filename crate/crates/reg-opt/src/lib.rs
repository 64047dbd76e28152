//! Regularized matrix optimizers built on row-and-column scaling, their
//! first-order baselines, test objectives, and numerical checks of the
//! convergence bounds the step rules are designed around.

pub mod error;
pub mod linalg;
pub mod optim;
pub mod problems;
pub mod racs;
pub mod schedule;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Matrix, NormOrder};
