//! Deterministic link-level simulator comparing network-controlled repeaters
//! (amplify-and-forward with beamforming and an output-power cap) against
//! passive reconfigurable surfaces on millimeter-wave links.
//!
//! The crate is organized around the signal chain:
//!
//! - [`units`]: dB/dBm boundary conversions and noise power;
//! - [`config`]: unit-tagged system parameters and the plain-text config format;
//! - [`geometry`]: 2D scenes, wall segments, blockage tests;
//! - [`channel`]: path loss, steering vectors, multipath channel synthesis;
//! - [`beamforming`]: SVD beam pairs, alternating optimization, DFT codebooks;
//! - [`ncr`]: repeater link budgets, output clamping, forwarded interference;
//! - [`ris`]: surface reflection model and the hardware-impairment rate;
//! - [`scenarios`]: the Monte Carlo engine and four experiment drivers;
//! - [`report`]: CSV emission and run manifests.
//!
//! Every run is reproducible: trials derive independent counter-based rng
//! streams from the master seed, and aggregation is an index-ordered
//! reduction, so outputs are byte-identical across thread counts.

pub mod beamforming;
pub mod channel;
pub mod config;
pub mod error;
pub mod geometry;
pub mod matrix;
pub mod ncr;
pub mod report;
pub mod ris;
pub mod rng;
pub mod scenarios;
pub mod units;

pub use config::{HwiParams, RunConfig, ScenarioKind, SystemParams};
pub use error::{Result, SimError};
pub use geometry::{Position, Wall};
pub use matrix::ComplexMatrix;
