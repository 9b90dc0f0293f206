//! Numerical laboratory for convergence of planar domains.
//!
//! Domains are bounded (an ambient disk minus obstacles). Their harmonic
//! measures are sampled with walk-on-spheres, compared with exact discrete
//! Wasserstein-1 transport, and checked against geometric notions of domain
//! convergence on uniform grids.

pub mod approximation;
pub mod convergence;
pub mod error;
pub mod geometry;
pub mod registry;
pub mod sampler;
pub mod scenarios;
pub mod transport;

pub use error::{Error, Result};
