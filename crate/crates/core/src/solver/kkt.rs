use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::problem::QpProblem;

/// Optimality measures of a primal-dual point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    /// `||2 Q F + lambda1 + lambda2 alpha||_inf`.
    pub stationarity: f64,
    /// `|alpha . F - target|` and `max_i |min(f_i, 0)|`, whichever is larger.
    pub feasibility: f64,
    /// `max_i |lambda1_i f_i|`.
    pub complementarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity.max(self.feasibility).max(self.complementarity)
    }
}

pub fn volume_residual(problem: &QpProblem, f: &[f64]) -> f64 {
    let s: f64 = problem.alpha().iter().zip(f).map(|(a, x)| a * x).sum();
    (s - problem.target()).abs()
}

pub fn kkt_residuals(problem: &QpProblem, f: &[f64], lambda1: &[f64], lambda2: f64) -> KktResiduals {
    let x = DVector::from_column_slice(f);
    let qf = problem.q() * &x;
    let stationarity = (0..f.len())
        .map(|i| (2.0 * qf[i] + lambda1[i] + lambda2 * problem.alpha()[i]).abs())
        .fold(0.0, f64::max);
    let negativity = f.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
    let complementarity = f.iter().zip(lambda1).map(|(a, b)| (a * b).abs()).fold(0.0, f64::max);
    KktResiduals {
        stationarity,
        feasibility: volume_residual(problem, f).max(negativity),
        complementarity,
    }
}

/// [`kkt_residuals`] made dimensionless.
///
/// Stationarity is divided by `||2QF||_inf + ||lambda1||_inf + |lambda2| ||alpha||_inf`,
/// the volume error by the target, negativity by `||F||_inf` and
/// complementarity by `||F||_inf ||lambda1||_inf`.
pub fn relative_kkt_residuals(problem: &QpProblem, f: &[f64], lambda1: &[f64], lambda2: f64) -> KktResiduals {
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let x = DVector::from_column_slice(f);
    let qf = problem.q() * &x;
    let f_scale = inf(f).max(f64::MIN_POSITIVE);
    let l_scale = inf(lambda1).max(f64::MIN_POSITIVE);
    let s_scale = (2.0 * inf(qf.as_slice()) + inf(lambda1) + lambda2.abs() * inf(problem.alpha())).max(f64::MIN_POSITIVE);
    let abs = kkt_residuals(problem, f, lambda1, lambda2);
    let negativity = f.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
    let volume = volume_residual(problem, f) / problem.target().max(f64::MIN_POSITIVE);
    KktResiduals {
        stationarity: abs.stationarity / s_scale,
        feasibility: volume.max(negativity / f_scale),
        complementarity: abs.complementarity / (f_scale * l_scale),
    }
}
