//! Finite-time quantum Otto cycle with a two-qubit XY working substance.
//!
//! The crate is organized around the four stages of such a study:
//!
//! * [`model`] — closed-form statics: spectrum, eigenbasis, Gibbs
//!   populations, the work function and its generator, adiabaticity
//!   thresholds.
//! * [`dynamics`] — the driven strokes: field schedules, the coupled
//!   amplitude equations of the working pair, a brute-force Schrödinger
//!   propagator used as an independent oracle, and microreversibility
//!   checks.
//! * [`cycle`] — stroke-level work and heat with adiabatic/nonadiabatic
//!   splits, regime classification and engine efficiency.
//! * [`analysis`] — temperature-space sweeps, adiabaticity and efficiency
//!   curves, engine-threshold and temperature-gap searches.
//!
//! [`verify`] bundles the randomized invariant suites behind a seed so the
//! command-line front end can re-run them deterministically.

pub mod analysis;
pub mod cycle;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
pub use model::ModelParams;
