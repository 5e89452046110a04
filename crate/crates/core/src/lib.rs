//! Finite-blocklength tools for soft covering and semantic security over
//! wiretap channels.

pub mod capacity;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod exponents;
pub mod info;
pub mod numeric;
pub mod parallel;
pub mod probability;
pub mod rng;
pub mod softcover;
pub mod wiretap;

pub use error::{Error, Result};
