//! Geometric complexity on SU(N) under weighted right-invariant metrics,
//! extended to open-system quantum channels.

pub mod algebraic;
pub mod basis;
pub mod campaign;
pub mod channel;
pub mod coherence;
pub mod complexity;
pub mod error;
pub mod harness;
pub mod operator;
pub mod optim;
pub mod rode;
pub mod sample;

pub use error::{Error, Result};
