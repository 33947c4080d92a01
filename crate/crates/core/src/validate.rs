//! Self-checks run by `hullopt validate`: the closed-form hat moments
//! against adaptive quadrature, and Uzawa against the projected-gradient
//! oracle on randomly drawn small problems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::Result;
use crate::geometry::build_grid;
use crate::quad::integrate_pieces;
use crate::solver::{combine_objective, reference_qp_oracle, uzawa_solve};
use crate::viscous::assemble_md;
use crate::wave::{a_minus, a_plus, assemble_mw, b_minus, b_plus, LambdaQuadrature};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    fn below(name: &str, value: f64, tol: f64) -> Self {
        Self { name: name.to_string(), value, tol, pass: value <= tol }
    }
}

/// Breakpoints splitting `[a, b]` into pieces no longer than `h`.
fn pieces(a: f64, b: f64, h: f64) -> Vec<f64> {
    let n = ((b - a) / h).ceil().clamp(1.0, 1e6) as usize;
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// `int_a^b kernel(x) weight(x) dx` and `int |kernel weight|`.
fn reference(kernel: impl Fn(f64) -> f64, weight: impl Fn(f64) -> f64, breaks: &[f64]) -> (f64, f64) {
    let v = integrate_pieces(|x| kernel(x) * weight(x), breaks, 1e-300, 1e-13);
    let m = integrate_pieces(|x| (kernel(x) * weight(x)).abs(), breaks, 1e-300, 1e-4);
    (v, m)
}

/// Moments below this have underflowed towards the subnormal range, where
/// relative errors mean nothing.
const TINY: f64 = 1e-280;

/// Largest error of the four hat moments relative to `int |integrand|`.
pub fn closed_form_error(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let lambda = 2f64.powf(rng.random_range(0.0..10.0));
        let v = 10f64.powf(rng.random_range(-0.5..1.5));
        let dx = 10f64.powf(rng.random_range(-2.0..-0.5));
        let dz = 10f64.powf(rng.random_range(-2.5..-1.0));
        let x = rng.random_range(-1.0..1.0);
        let z = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(dz..0.2 + dz) };
        let (k, mu) = (lambda * v, lambda * lambda * v);
        let hx = (0.25 / k).min(dx / 8.0);
        let cos = |s: f64| (k * s).cos();
        let decay = |s: f64| (-mu * s).exp();
        let z_breaks = |lo: f64, hi: f64| {
            let mut b = pieces(lo, hi, dz / 8.0);
            let mut t = 1.0 / mu;
            while t < hi - lo {
                b.push(lo + t);
                t *= 2.0;
            }
            b.sort_by(f64::total_cmp);
            b
        };
        let cases = [
            (a_plus(lambda, v, x, dx), reference(cos, |s| x + dx - s, &pieces(x, x + dx, hx))),
            (a_minus(lambda, v, x, dx), reference(cos, |s| s - x + dx, &pieces(x - dx, x, hx))),
            (b_plus(lambda, v, z, dz), reference(decay, |s| z + dz - s, &z_breaks(z, z + dz))),
        ];
        for (closed, (exact, scale)) in cases {
            if scale > TINY {
                worst = worst.max((closed - exact).abs() / scale);
            }
        }
        if z > 0.0 {
            let (exact, scale) = reference(decay, |s| s - z + dz, &z_breaks(z - dz, z));
            if scale > TINY {
                worst = worst.max((b_minus(lambda, v, z, dz) - exact).abs() / scale);
            }
        }
    }
    worst
}

/// Largest `||F_uzawa - F_oracle||_inf / max F` over random small problems.
pub fn solver_mismatch(cases: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = RunConfig::default();
    let p = &cfg.physical;
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let nx = rng.random_range(3..=6usize);
        let nz = rng.random_range(2..=4usize);
        let fr = rng.random_range(0.4..1.5);
        let eps_factor = 10f64.powf(rng.random_range(0.0..1.0));
        let grid = build_grid(p.length, p.draft, nx, nz)?;
        let flow = cfg.flow_at(fr)?;
        let wave = assemble_mw(&grid, flow.kelvin_wavenumber(), &LambdaQuadrature::uniform(20, 10)?)?;
        let problem =
            combine_objective(&grid, &wave, &assemble_md(&grid), p.rho, p.g, flow.eps() * eps_factor, p.volume)?;
        let opts = crate::solver::UzawaOptions { tol: 1e-12, ..Default::default() };
        let fast = uzawa_solve(&problem, &opts, None)?;
        let slow = reference_qp_oracle(&problem, 200_000);
        let scale = fast.f.iter().copied().fold(0.0, f64::max);
        let diff = fast.f.iter().zip(&slow.f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(diff / scale);
    }
    Ok(worst)
}

/// Runs every check with fixtures drawn from `seed`.
pub fn run_checks(seed: u64) -> Result<Vec<Check>> {
    let mut checks = vec![Check::below("closed-form moments vs quadrature", closed_form_error(200, seed), 1e-10)];
    let omega: Vec<f64> = [10, 80, 320]
        .iter()
        .map(|&n| LambdaQuadrature::single_node(n).map(|q| q.omega0()))
        .collect::<Result<_>>()?;
    let positive = omega.iter().all(|&w| w > 0.0) && omega.windows(2).all(|w| w[1] < w[0]);
    checks.push(Check { name: "omega0 positive and decreasing".into(), value: omega[2], tol: 0.0, pass: positive });
    checks.push(Check::below("uzawa vs projected gradient", solver_mismatch(4, seed)?, 1e-6));
    Ok(checks)
}
