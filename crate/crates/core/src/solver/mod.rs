//! Constrained quadratic program over nonnegative fixed-volume hulls.

pub mod kkt;
pub mod oracle;
pub mod problem;
pub mod uzawa;

pub use kkt::{kkt_residuals, relative_kkt_residuals, KktResiduals};
pub use oracle::{project_weighted_simplex, reference_qp_oracle, OracleResult};
pub use problem::{combine_objective, QpProblem};
pub use uzawa::{uzawa_solve, SolveReport, UzawaOptions};
