//! Hulls that the continuous wave-resistance operator cannot see.
//!
//! For any `h` with compact support inside the domain, the function
//! `f = d^2h/dx^2 + v dh/dz` has a vanishing transform for every lambda, so
//! its wave resistance is zero. The discrete operator only sees the Q1
//! interpolation error of `f`, which vanishes under refinement.

use std::f64::consts::PI;

use super::matrix::j_vector;
use super::quadrature::LambdaQuadrature;
use crate::error::{HullError, Result};
use crate::geometry::GridSpec;

/// Product of squared sine bumps on the box `[x0, x1] x [z0, z1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineBump {
    pub x0: f64,
    pub x1: f64,
    pub z0: f64,
    pub z1: f64,
    pub amplitude: f64,
}

impl SineBump {
    /// Box covering the middle half of the domain in each direction.
    pub fn centered(grid: &GridSpec, amplitude: f64) -> Self {
        let (l, t) = (grid.length(), grid.draft());
        Self { x0: -0.25 * l, x1: 0.25 * l, z0: 0.25 * t, z1: 0.75 * t, amplitude }
    }

    fn inside(&self, x: f64, z: f64) -> bool {
        x > self.x0 && x < self.x1 && z > self.z0 && z < self.z1
    }

    fn phases(&self, x: f64, z: f64) -> (f64, f64, f64, f64) {
        let kx = PI / (self.x1 - self.x0);
        let kz = PI / (self.z1 - self.z0);
        (kx * (x - self.x0), kz * (z - self.z0), kx, kz)
    }

    pub fn value(&self, x: f64, z: f64) -> f64 {
        if !self.inside(x, z) {
            return 0.0;
        }
        let (px, pz, _, _) = self.phases(x, z);
        self.amplitude * px.sin().powi(2) * pz.sin().powi(2)
    }

    /// `d^2h/dx^2 + v dh/dz`.
    pub fn null_hull(&self, v: f64, x: f64, z: f64) -> f64 {
        if !self.inside(x, z) {
            return 0.0;
        }
        let (px, pz, kx, kz) = self.phases(x, z);
        let hxx = 2.0 * kx * kx * (2.0 * px).cos() * pz.sin().powi(2);
        let hz = px.sin().powi(2) * kz * (2.0 * pz).sin();
        self.amplitude * (hxx + v * hz)
    }
}

/// Discrete wave energy of the sampled null hull `f`, relative to that of `|f|`.
///
/// Returns `sum_j w_j (J_j . F)^2 / sum_j w_j (J_j . |F|)^2`; zero for a zero bump.
pub fn null_space_residual(grid: &GridSpec, v: f64, quad: &LambdaQuadrature, bump: &SineBump) -> Result<f64> {
    let (l, t) = (grid.length(), grid.draft());
    if !(bump.x0 > -0.5 * l && bump.x1 < 0.5 * l && bump.z0 > 0.0 && bump.z1 < t && bump.x0 < bump.x1 && bump.z0 < bump.z1)
    {
        return Err(HullError::arg("bump", "support must lie strictly inside the domain"));
    }
    let f: Vec<f64> = grid.nodes().iter().map(|n| bump.null_hull(v, n.x, n.z)).collect();
    let abs: Vec<f64> = f.iter().map(|x| x.abs()).collect();
    let (mut signed, mut reference) = (0.0, 0.0);
    for (&lambda, &w) in quad.nodes().iter().zip(quad.weights()) {
        let j = j_vector(grid, v, lambda);
        let a: f64 = j.iter().zip(&f).map(|(x, y)| x * y).sum();
        let b: f64 = j.iter().zip(&abs).map(|(x, y)| x * y).sum();
        signed += w * a * a;
        reference += w * b * b;
    }
    if reference == 0.0 {
        return Ok(0.0);
    }
    Ok(signed / reference)
}
