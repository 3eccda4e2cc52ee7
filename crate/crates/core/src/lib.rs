//! Exact constructions and verifiers for fractional chromatic number bounds of the plane.
//!
//! The crate builds unit-distance graphs with coordinates in Q(√3, √11),
//! solves the associated weight LPs exactly, and machine-checks a tiling and
//! discharging argument on finite cores.

pub mod error;
pub mod exactnum;
pub mod json;
pub mod lattice;
pub mod udgraph;

pub use error::{Error, Result};
pub mod fraclp;
pub mod tiling;
pub mod indsets;
pub mod par;
pub mod discharge;
