//! Numerical laboratory for shallow ReLU^s networks.

pub mod error;
pub mod learner;
pub mod net;
pub mod quad;
pub mod rates;
pub mod rng;
pub mod sphere;
pub mod targets;

pub use error::{Error, Result};
