//! Compressed-domain detection and angle estimation for colocated MIMO radar.
//!
//! The processing chain is
//! scene ([`model`]) → random compression ([`compression`]) → Capon clutter
//! suppression and second compression ([`beamformer`]) → GLRT detection in the
//! compressed domain ([`detector`], [`multitarget`]). [`experiments`] runs the
//! seeded Monte Carlo studies and [`cli`] wraps them with config files and CSV
//! output.

pub mod beamformer;
pub mod cli;
pub mod compression;
pub mod detector;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod multitarget;
pub mod pipeline;
pub mod rng;

pub use error::{Error, Result};
pub use model::{ClutterModel, RadarConfig, Target};
