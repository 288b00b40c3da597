//! Simulation toolkit for a two-qutrit superconducting processor.

pub mod algorithms;
pub mod calibration;
pub mod circuit;
pub mod compiler;
pub mod device;
pub mod error;
pub mod gates;
pub mod harness;
pub mod linalg;
pub mod mitigation;
pub mod noise;
pub mod process;
pub mod sim;
pub mod state;

pub use error::{Error, Result};
