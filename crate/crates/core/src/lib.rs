//! Random-graph embedding and common-subgraph phase transitions: exact
//! solvers, threshold calculus, finite-`n` moment identities with
//! enumeration checks, and a reproducible Monte Carlo harness.

pub mod edgegraph;
pub mod error;
pub mod experiments;
pub mod graphs;
pub mod isosearch;
pub mod moments;
pub mod params;
pub mod rado;
pub mod rng;
pub mod thresholds;
pub mod verify;

pub use error::{Error, Result};
