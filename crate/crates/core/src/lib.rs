//! Coverage analysis of geostationary satellite networks.
//!
//! Satellites are placed as a binomial point process on the geostationary
//! circle and a typical terminal at latitude `phi` is served by the nearest
//! visible satellite. The crate provides the closed-form geometry, the
//! distance laws, the interference Laplace transforms and coverage
//! probabilities (exact binomial and Poisson-limit forms), a Monte Carlo
//! simulator that checks all of them, and a TLE pipeline that compares a real
//! constellation snapshot against the model.

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod config;
pub mod distance;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod quadrature;
pub mod stats;
pub mod tle;

pub use error::{Error, Result};
pub use geometry::{GeometryContext, TerminalPosition};
