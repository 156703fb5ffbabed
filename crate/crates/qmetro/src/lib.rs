//! Density-matrix simulation of noisy quantum sensing with variational
//! principal-component purification.
//!
//! The library models a magnetometry pipeline end to end: a single-qubit or
//! GHZ probe picks up a field-dependent phase, a noise channel corrupts the
//! resulting state, a parameterized-circuit diagonalizer extracts the
//! dominant component, and figures of merit (fidelity, absolute percentage
//! error, quantum Fisher information) quantify what the purification buys.
//!
//! Modules:
//! - [`state`]: state vectors, density matrices, unitaries, eigenstructure
//! - [`channels`]: Kraus channels (unitary mixtures, depolarizing, amplitude
//!   damping) and the noise-overlap metric
//! - [`sensing`]: probe preparation, phase encoding, Ramsey readout, Gaussian
//!   field-noise ensembles, field estimation
//! - [`qpca`]: the variational diagonalizer, principal-component extraction
//!   and its exact reference
//! - [`metrics`]: quantum Fisher information, Cramer-Rao bound, APE, dB gain
//! - [`harness`]: config-driven experiment sweeps with CSV output
//!
//! Runnable examples live under `examples/`, one per capability. The `qmetro`
//! binary drives the same sweeps from configuration files.

pub mod channels;
pub mod error;
pub mod exchange;
pub mod harness;
pub mod metrics;
pub mod qpca;
pub mod sensing;
pub mod state;

pub use error::{Error, Result};
