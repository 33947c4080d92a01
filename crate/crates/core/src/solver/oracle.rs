//! Independent reference solver: projected gradient descent with exact
//! projection onto the weighted simplex `{F >= 0, alpha . F = target}`.

use nalgebra::DVector;

use super::problem::QpProblem;

/// Euclidean projection of `y` onto `{x >= 0, alpha . x = target}`.
///
/// The projection is `max(y - tau alpha, 0)`; `tau` is bracketed, bisected,
/// then recomputed exactly from the resulting support.
pub fn project_weighted_simplex(y: &[f64], alpha: &[f64], target: f64) -> Vec<f64> {
    let mass = |tau: f64| -> f64 { y.iter().zip(alpha).map(|(yi, a)| a * (yi - tau * a).max(0.0)).sum() };
    let aa: f64 = alpha.iter().map(|a| a * a).sum();
    let ay: f64 = alpha.iter().zip(y).map(|(a, yi)| a * yi).sum();
    let mut lo = (ay - target) / aa;
    let mut hi = y.iter().zip(alpha).map(|(yi, a)| yi / a).fold(f64::NEG_INFINITY, f64::max);
    if hi < lo {
        hi = lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau0 = 0.5 * (lo + hi);
    let support: Vec<usize> = (0..y.len()).filter(|&i| y[i] - tau0 * alpha[i] > 0.0).collect();
    let tau = if support.is_empty() {
        tau0
    } else {
        let sa: f64 = support.iter().map(|&i| alpha[i] * y[i]).sum();
        let s2: f64 = support.iter().map(|&i| alpha[i] * alpha[i]).sum();
        (sa - target) / s2
    };
    y.iter().zip(alpha).map(|(yi, a)| (yi - tau * a).max(0.0)).collect()
}

/// Result of [`reference_qp_oracle`] with its objective history endpoints.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub f: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Largest objective increase seen between consecutive iterates (should be <= 0).
    pub max_increase: f64,
}

/// Projected gradient descent with backtracking, run for at most `iterations`
/// steps or until the iterate stops moving.
pub fn reference_qp_oracle(problem: &QpProblem, iterations: usize) -> OracleResult {
    let q = problem.q();
    let alpha = problem.alpha();
    let target = problem.target();
    let n = problem.dim();
    let objective = |x: &DVector<f64>| x.dot(&(q * x));

    // step from a power-iteration estimate of lambda_max(2Q), refined by backtracking
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut lmax = 0.0;
    for _ in 0..100 {
        let w = q * &v;
        lmax = w.norm();
        if lmax == 0.0 {
            break;
        }
        v = w / lmax;
    }
    let mut step = 1.0 / (2.0 * lmax.max(f64::MIN_POSITIVE));

    let start = vec![target / alpha.iter().sum::<f64>(); n];
    let mut x = DVector::from_vec(project_weighted_simplex(&start, alpha, target));
    let mut fx = objective(&x);
    let mut max_increase = f64::NEG_INFINITY;
    let mut still = 0;
    let mut done = 0;
    for it in 1..=iterations {
        done = it;
        let grad = q * &x * 2.0;
        let mut trial;
        let mut f_trial;
        loop {
            let y: Vec<f64> = x.iter().zip(grad.iter()).map(|(xi, gi)| xi - step * gi).collect();
            trial = DVector::from_vec(project_weighted_simplex(&y, alpha, target));
            f_trial = objective(&trial);
            let d = &trial - &x;
            let model = fx + grad.dot(&d) + d.norm_squared() / (2.0 * step);
            if f_trial <= model + 1e-15 * fx.abs() || step < 1e-300 {
                break;
            }
            step *= 0.5;
        }
        let moved = (&trial - &x).amax();
        max_increase = max_increase.max(f_trial - fx);
        x = trial;
        fx = f_trial;
        if moved <= 1e-16 * x.amax().max(f64::MIN_POSITIVE) {
            still += 1;
            if still >= 20 {
                break;
            }
        } else {
            still = 0;
        }
    }
    OracleResult { f: x.as_slice().to_vec(), objective: fx, iterations: done, max_increase }
}
