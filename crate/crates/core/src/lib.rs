//! Secrecy-rate beamforming for amplify-and-forward relay networks with an
//! eavesdropper: channel model, total- and per-relay-power designs, and a
//! Monte-Carlo harness.

pub mod beamform;
pub mod channel;
pub mod error;
pub mod harness;
pub mod linalg;

pub use error::{Error, Result, SolverError};
