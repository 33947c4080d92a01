//! Optimal thin-ship hulls under Michell wave resistance and linearized
//! viscous drag.
//!
//! The pipeline is: build a [`geometry::GridSpec`], assemble the wave matrix
//! ([`wave::assemble_mw`]) and the drag stiffness ([`viscous::assemble_md`]),
//! combine them into a [`solver::QpProblem`] and run
//! [`solver::uzawa_solve`]. [`analysis`] wraps this into the parameter
//! studies exposed by the `hullopt` binary.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod quad;
pub mod solver;
pub mod validate;
pub mod viscous;
pub mod wave;

pub use error::{HullError, Result};
