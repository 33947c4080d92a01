//! Reference wave-resistance evaluation by direct quadrature of the hull.
//!
//! Used to cross-check the matrix path: the Fourier-Laplace transform of the
//! hull is integrated numerically for each lambda node, then the same
//! weighted lambda sum is applied.

use rayon::prelude::*;

use super::quadrature::LambdaQuadrature;
use crate::quad::integrate_pieces;

/// Integration domain and breakpoints for the 2D hull quadrature.
#[derive(Debug, Clone)]
pub struct DirectOptions {
    /// Breakpoints in x covering `[-L/2, L/2]`; put cell edges here for Q1 hulls.
    pub x_breaks: Vec<f64>,
    /// Breakpoints in z covering `[0, T]`.
    pub z_breaks: Vec<f64>,
    /// Bound on the magnitude of the hull, used to set absolute tolerances.
    pub f_scale: f64,
    pub rel_tol: f64,
}

impl DirectOptions {
    /// Evenly spaced breakpoints with `nx` and `nz` pieces.
    pub fn uniform(length: f64, draft: f64, nx: usize, nz: usize, f_scale: f64) -> Self {
        let x_breaks = (0..=nx).map(|i| -0.5 * length + length * i as f64 / nx as f64).collect();
        let z_breaks = (0..=nz).map(|i| draft * i as f64 / nz as f64).collect();
        Self { x_breaks, z_breaks, f_scale, rel_tol: 1e-12 }
    }

    fn length(&self) -> f64 {
        self.x_breaks.last().unwrap() - self.x_breaks[0]
    }

    fn draft(&self) -> f64 {
        self.z_breaks.last().unwrap() - self.z_breaks[0]
    }
}

/// Adds the points `2^m / mu` to `breaks` so that the boundary layer of
/// `e^{-mu z}` at the waterline is resolved by the adaptive rule.
fn decay_breaks(breaks: &[f64], mu: f64) -> Vec<f64> {
    let (z0, z1) = (breaks[0], *breaks.last().unwrap());
    let mut out = breaks.to_vec();
    let mut z = z0 + 1.0 / mu;
    while z < z1 {
        out.push(z);
        z = z0 + 2.0 * (z - z0);
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (z1 - z0));
    out
}

/// `(int f e^{-mu z} cos(k x), int f e^{-mu z} sin(k x))` with `k = lambda v`, `mu = lambda^2 v`.
pub fn hull_transform<H>(hull: &H, v: f64, lambda: f64, opts: &DirectOptions) -> (f64, f64)
where
    H: Fn(f64, f64) -> f64 + ?Sized,
{
    let k = lambda * v;
    let mu = lambda * lambda * v;
    let z_scale = opts.f_scale * opts.draft().min(1.0 / mu);
    let x_scale = z_scale * opts.length();
    let z_breaks = decay_breaks(&opts.z_breaks, mu);
    let depth = |x: f64| {
        integrate_pieces(|z| hull(x, z) * (-mu * z).exp(), &z_breaks, 1e-15 * z_scale, opts.rel_tol)
    };
    let c = integrate_pieces(|x| depth(x) * (k * x).cos(), &opts.x_breaks, 1e-15 * x_scale, opts.rel_tol);
    let s = integrate_pieces(|x| depth(x) * (k * x).sin(), &opts.x_breaks, 1e-15 * x_scale, opts.rel_tol);
    (c, s)
}

/// Cosine transform only: `J~(lambda)`.
pub fn hull_cos_transform<H>(hull: &H, v: f64, lambda: f64, opts: &DirectOptions) -> f64
where
    H: Fn(f64, f64) -> f64 + ?Sized,
{
    let k = lambda * v;
    let mu = lambda * lambda * v;
    let z_scale = opts.f_scale * opts.draft().min(1.0 / mu);
    let x_scale = z_scale * opts.length();
    let z_breaks = decay_breaks(&opts.z_breaks, mu);
    let depth = |x: f64| {
        integrate_pieces(|z| hull(x, z) * (-mu * z).exp(), &z_breaks, 1e-15 * z_scale, opts.rel_tol)
    };
    integrate_pieces(|x| depth(x) * (k * x).cos(), &opts.x_breaks, 1e-15 * x_scale, opts.rel_tol)
}

fn prefactor(rho: f64, g: f64, v: f64) -> f64 {
    4.0 * rho * g * v * v * v / std::f64::consts::PI
}

/// Wave resistance with the cosine part only, matching the matrix path.
pub fn wave_resistance_direct<H>(
    hull: &H,
    rho: f64,
    g: f64,
    v: f64,
    quad: &LambdaQuadrature,
    opts: &DirectOptions,
) -> f64
where
    H: Fn(f64, f64) -> f64 + Sync + ?Sized,
{
    let sum: f64 = quad
        .nodes()
        .par_iter()
        .zip(quad.weights().par_iter())
        .map(|(&l, &w)| {
            let c = hull_cos_transform(hull, v, l, opts);
            w * c * c
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    prefactor(rho, g, v) * sum
}

/// Wave resistance from `|T_f|^2`, keeping the sine (antisymmetric) part as well.
pub fn wave_resistance_full<H>(
    hull: &H,
    rho: f64,
    g: f64,
    v: f64,
    quad: &LambdaQuadrature,
    opts: &DirectOptions,
) -> f64
where
    H: Fn(f64, f64) -> f64 + Sync + ?Sized,
{
    let sum: f64 = quad
        .nodes()
        .par_iter()
        .zip(quad.weights().par_iter())
        .map(|(&l, &w)| {
            let (c, s) = hull_transform(hull, v, l, opts);
            w * (c * c + s * s)
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    prefactor(rho, g, v) * sum
}
