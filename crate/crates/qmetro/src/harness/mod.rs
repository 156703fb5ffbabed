//! Config-driven experiment sweeps with CSV output.
//!
//! Five experiments cover the usual questions asked of the purification
//! pipeline: fidelity gain over a (P0, overlap) grid, Fisher-information
//! gain for GHZ probes, field-estimation accuracy under Gaussian noise,
//! optimizer convergence versus noise, and robustness to a lossy
//! transmission link. Each run is driven by a flat key-value configuration
//! file and emits one CSV table; identical (config, seed) pairs produce
//! byte-identical output regardless of thread count.

pub mod config;
pub mod noise;
pub mod run;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind, GridAxis};
pub use noise::{collective_y_rotation, noise_unitary_for_overlap, phase_kick, NoiseFamily};
pub use run::{run_experiment, CellStatus, HarnessError, RunOutput, SweepRecord};
