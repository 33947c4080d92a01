//! Discrete Michell wave resistance.

pub mod basis;
pub mod direct;
pub mod matrix;
pub mod nullspace;
pub mod quadrature;

pub use basis::{a_minus, a_plus, a_sum, b_minus, b_plus};
pub use direct::{wave_resistance_direct, wave_resistance_full, DirectOptions};
pub use matrix::{assemble_mw, assemble_mw_parallel, j_vector, select_quadrature, wave_resistance, WaveMatrix};
pub use nullspace::{null_space_residual, SineBump};
pub use quadrature::LambdaQuadrature;
