//! Discrete PT-symmetric square wells on a uniform lattice.

pub mod aberth;
pub mod charpoly;
pub mod chebyshev;
pub mod error;
pub mod metric;
pub mod model;
pub mod realform;
pub mod secular;
pub mod spectral;
pub mod tracking;

pub use error::{Error, Result};
