//! Device-to-device caching network simulator.
//!
//! Users are dropped uniformly in the unit square, each caches one file drawn
//! from a Zipf caching distribution and requests one file drawn from a Zipf
//! request distribution. A potential D2D link exists when a neighbor within the
//! collaboration distance caches the requested file. Links interfere under the
//! protocol model, and a scheduler picks an independent set of the resulting
//! conflict graph. The [`experiment`] module estimates the expected number of
//! active links by Monte Carlo and fits scaling exponents against the
//! closed forms in [`theory`].

pub mod caching;
pub mod cli;
mod error;
pub mod experiment;
pub mod geometry;
pub mod graph;
pub mod linkplan;
pub mod popularity;
pub mod scheduling;
pub mod theory;

pub use error::{Error, Result};
