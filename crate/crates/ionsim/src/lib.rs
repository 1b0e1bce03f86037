//! Desk-scale simulator for trapped-ion optical-qubit experiments: the
//! native gate set (`R_phi`, virtual `R_z`, Mølmer–Sørensen `XX`),
//! transpilation of {H, CX} circuits onto it, density-matrix noise channels
//! calibrated to measured gate and readout errors, GHZ-state preparation
//! with dynamical-decoupling pulses, and the population + parity-oscillation
//! protocol that estimates state fidelity and evaluates the entanglement
//! witness.
//!
//! Basis convention everywhere: qubit 0 is the most significant bit of a
//! computational-basis index.

pub mod calibrate;
pub mod circuit;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod gates;
pub mod ghz;
pub mod math;
pub mod noise;
pub mod sim;
pub mod state;
pub mod transpile;

pub use error::{Error, Result};
