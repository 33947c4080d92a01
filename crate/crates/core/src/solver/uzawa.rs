use nalgebra::{Cholesky, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::kkt::{relative_kkt_residuals, KktResiduals};
use super::problem::QpProblem;
use crate::error::{HullError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UzawaOptions {
    /// Step on the sign multiplier; derived from `||Q^-1||` when unset.
    pub dr1: Option<f64>,
    /// Step on the volume multiplier; derived from `alpha^T Q^-1 alpha` when unset.
    pub dr2: Option<f64>,
    /// Relative tolerance on updates and KKT residuals.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for UzawaOptions {
    fn default() -> Self {
        Self { dr1: None, dr2: None, tol: 1e-8, max_iter: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub f: Vec<f64>,
    pub objective: f64,
    pub wave_part: f64,
    pub viscous_part: f64,
    pub iterations: usize,
    /// Dimensionless KKT residuals, see [`relative_kkt_residuals`](super::kkt::relative_kkt_residuals).
    pub residuals: KktResiduals,
    pub lambda1: Vec<f64>,
    pub lambda2: f64,
    pub dr1: f64,
    pub dr2: f64,
}

/// Cholesky factor of `Q` with lazily computed columns of `Q^-1`.
struct InverseCache {
    chol: Cholesky<f64, Dyn>,
    columns: Vec<Option<Vec<f64>>>,
}

impl InverseCache {
    fn new(problem: &QpProblem) -> Result<Self> {
        let chol = Cholesky::new(problem.q().clone()).ok_or(HullError::NotPositiveDefinite)?;
        Ok(Self { chol, columns: vec![None; problem.dim()] })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.chol.solve(&DVector::from_column_slice(rhs)).as_slice().to_vec()
    }

    fn column(&mut self, i: usize) -> &[f64] {
        if self.columns[i].is_none() {
            let mut e = vec![0.0; self.columns.len()];
            e[i] = 1.0;
            self.columns[i] = Some(self.solve(&e));
        }
        self.columns[i].as_deref().unwrap()
    }

    /// Power-iteration estimate of `||Q^-1||_2` from 50 solves.
    ///
    /// The start vector has no mirror symmetry: `Q` commutes with the
    /// reflection in x, so an even start would never see the odd modes.
    fn inverse_norm(&self) -> f64 {
        let n = self.columns.len();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (0.618_033_988_749_895 * i as f64).fract()).collect();
        let norm0 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm0);
        let mut est = 0.0;
        for _ in 0..50 {
            let y = self.solve(&x);
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            est = norm;
            x = y.into_iter().map(|v| v / norm).collect();
        }
        est
    }
}

fn inf_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Iterations ignored by the divergence guard.
const BURN_IN: usize = 200;
/// Growth of the update norm over its running minimum that counts as a step-size fault.
const GROWTH_LIMIT: f64 = 1e8;
const TRACE_LEN: usize = 256;

/// Uzawa saddle-point iteration for [`QpProblem`].
///
/// Each step minimizes the Lagrangian in `F`, giving
/// `F = -Q^-1 (lambda1 + lambda2 alpha) / 2`, then moves the multipliers along
/// the constraint residuals and projects `lambda1` onto the nonpositive
/// orthant. `f_init` seeds the multipliers so that the first primal iterate
/// reproduces it as closely as the sign constraint allows.
pub fn uzawa_solve(problem: &QpProblem, opts: &UzawaOptions, f_init: Option<&[f64]>) -> Result<SolveReport> {
    let n = problem.dim();
    if let Some(f0) = f_init {
        if f0.len() != n {
            return Err(HullError::DimensionMismatch { expected: n, got: f0.len() });
        }
    }
    for (name, step) in [("dr1", opts.dr1), ("dr2", opts.dr2)] {
        if let Some(s) = step {
            if !(s > 0.0 && s.is_finite()) {
                return Err(HullError::arg(name, format!("must be positive, got {s}")));
            }
        }
    }
    if !(opts.tol > 0.0) {
        return Err(HullError::arg("tol", "must be positive"));
    }

    let alpha = problem.alpha();
    let target = problem.target();
    let mut cache = InverseCache::new(problem)?;
    let w = cache.solve(alpha);
    let alpha_w: f64 = alpha.iter().zip(&w).map(|(a, b)| a * b).sum();
    if !(alpha_w > 0.0) {
        return Err(HullError::NotPositiveDefinite);
    }
    let dr1 = opts.dr1.unwrap_or_else(|| 1.5 / cache.inverse_norm());
    let dr2 = opts.dr2.unwrap_or(1.0 / alpha_w);

    let (mut lambda1, mut lambda2) = match f_init {
        Some(f0) => warm_multipliers(problem, f0),
        None => (vec![0.0; n], 0.0),
    };

    let f_ref = target / alpha.iter().sum::<f64>();
    let mut f = vec![0.0; n];
    let mut prev_f = f_init.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut trace = Vec::new();
    let mut best = f64::INFINITY;
    let mut last = f64::NAN;

    for iter in 1..=opts.max_iter {
        primal(&mut cache, &w, &lambda1, lambda2, &mut f);

        let volume: f64 = alpha.iter().zip(&f).map(|(a, x)| a * x).sum::<f64>() - target;
        let new_lambda1: Vec<f64> = lambda1.iter().zip(&f).map(|(l, x)| (l + dr1 * x).min(0.0)).collect();
        let new_lambda2 = lambda2 + dr2 * volume;

        let f_scale = inf_norm(&f).max(f_ref).max(f64::MIN_POSITIVE);
        let l_scale = inf_norm(&lambda1)
            .max(lambda2.abs())
            .max(inf_norm(&new_lambda1))
            .max(new_lambda2.abs())
            .max(f64::MIN_POSITIVE);
        let negativity = f.iter().map(|&x| (-x).max(0.0)).fold(0.0, f64::max);
        let complementarity = f.iter().zip(&lambda1).map(|(x, l)| (x * l).abs()).fold(0.0, f64::max);
        let update = (inf_norm_diff(&f, &prev_f) / f_scale)
            .max(inf_norm_diff(&new_lambda1, &lambda1) / l_scale)
            .max((new_lambda2 - lambda2).abs() / l_scale);
        let residual = update
            .max(volume.abs() / target.max(f_ref).max(f64::MIN_POSITIVE))
            .max(negativity / f_scale)
            .max(complementarity / (f_scale * l_scale));

        if !residual.is_finite() {
            return Err(HullError::StepSizeFault { from: best, to: residual });
        }
        if iter > BURN_IN && residual > GROWTH_LIMIT * best {
            return Err(HullError::StepSizeFault { from: best, to: residual });
        }
        best = best.min(residual);
        last = residual;
        if trace.len() < TRACE_LEN || iter % (opts.max_iter / TRACE_LEN).max(1) == 0 {
            trace.push(residual);
        }

        if residual <= opts.tol || (target == 0.0 && inf_norm(&f) == 0.0) {
            // (f, lambda1, lambda2) is the stationary triple of this iterate
            let residuals = relative_kkt_residuals(problem, &f, &lambda1, lambda2);
            let objective = problem.objective(&f);
            let viscous_part = problem.viscous_part(&f).unwrap_or(0.0);
            return Ok(SolveReport {
                f,
                objective,
                wave_part: objective - viscous_part,
                viscous_part,
                iterations: iter,
                residuals,
                lambda1,
                lambda2,
                dr1,
                dr2,
            });
        }

        std::mem::swap(&mut prev_f, &mut f);
        lambda1 = new_lambda1;
        lambda2 = new_lambda2;
    }

    Err(HullError::Divergence { iterations: opts.max_iter, last_residual: last, trace })
}

/// `f = -(Q^-1 lambda1 + lambda2 w) / 2` using only the nonzero multipliers.
fn primal(cache: &mut InverseCache, w: &[f64], lambda1: &[f64], lambda2: f64, f: &mut [f64]) {
    for (fi, wi) in f.iter_mut().zip(w) {
        *fi = lambda2 * wi;
    }
    for (i, &l) in lambda1.iter().enumerate() {
        if l != 0.0 {
            let col = cache.column(i);
            for (fi, c) in f.iter_mut().zip(col) {
                *fi += l * c;
            }
        }
    }
    for fi in f.iter_mut() {
        *fi *= -0.5;
    }
}

/// Multipliers whose Lagrangian minimizer is close to `f0`.
///
/// Stationarity asks for `lambda1 + lambda2 alpha = -2 Q f0`; the volume
/// multiplier takes the alpha-component and the sign multiplier keeps the
/// nonpositive remainder.
fn warm_multipliers(problem: &QpProblem, f0: &[f64]) -> (Vec<f64>, f64) {
    let x = DVector::from_column_slice(f0);
    let g = problem.q() * &x * -2.0;
    let alpha = problem.alpha();
    let aa: f64 = alpha.iter().map(|a| a * a).sum();
    let lambda2 = alpha.iter().zip(g.iter()).map(|(a, gi)| a * gi).sum::<f64>() / aa;
    let lambda1 = g.iter().zip(alpha).map(|(gi, a)| (gi - lambda2 * a).min(0.0)).collect();
    (lambda1, lambda2)
}
