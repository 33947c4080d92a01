//! Reference integrals for the tests, independent of the library's own
//! quadrature: composite Gauss-Legendre on panels sized to the kernel.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::OnceLock;

const ORDER: usize = 20;

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton's method.
fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let (mut x, mut w) = (vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, t);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
                let step = p1 / dp;
                t -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            x[i] = t;
            w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
        (x, w)
    })
}

/// `(int f, int |f|)` over consecutive pieces of `breaks`.
pub fn gauss_pieces(f: impl Fn(f64) -> f64, breaks: &[f64]) -> (f64, f64) {
    let (x, w) = rule();
    let (mut sum, mut abs) = (0.0, 0.0);
    for p in breaks.windows(2) {
        let (c, h) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
        for (xi, wi) in x.iter().zip(w) {
            let y = f(c + h * xi);
            sum += wi * h * y;
            abs += wi * h * y.abs();
        }
    }
    (sum, abs)
}

/// Uniform panels of length at most `h` on `[a, b]`.
pub fn uniform_breaks(a: f64, b: f64, h: f64) -> Vec<f64> {
    let n = ((b - a) / h).ceil().max(1.0) as usize;
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Panels for `exp(-mu (s - a))` on `[a, b]`: geometric from `a`, never
/// longer than `(b - a) / 4`.
pub fn decay_breaks(a: f64, b: f64, mu: f64) -> Vec<f64> {
    let mut out = uniform_breaks(a, b, 0.25 * (b - a));
    let mut t = 0.5 / mu;
    while t < b - a {
        out.push(a + t);
        t *= 2.0;
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// `int_{x_i}^{x_i+dx} cos(k s) (x_i + dx - s) ds` and its absolute integral.
pub fn a_plus_ref(lambda: f64, v: f64, x: f64, dx: f64) -> (f64, f64) {
    let k = lambda * v;
    let b = uniform_breaks(x, x + dx, (PI / k).min(dx));
    gauss_pieces(|s| (k * s).cos() * (x + dx - s), &b)
}

pub fn a_minus_ref(lambda: f64, v: f64, x: f64, dx: f64) -> (f64, f64) {
    let k = lambda * v;
    let b = uniform_breaks(x - dx, x, (PI / k).min(dx));
    gauss_pieces(|s| (k * s).cos() * (s - x + dx), &b)
}

pub fn b_plus_ref(lambda: f64, v: f64, z: f64, dz: f64) -> (f64, f64) {
    let mu = lambda * lambda * v;
    gauss_pieces(|s| (-mu * s).exp() * (z + dz - s), &decay_breaks(z, z + dz, mu))
}

pub fn b_minus_ref(lambda: f64, v: f64, z: f64, dz: f64) -> (f64, f64) {
    if z <= 0.0 {
        return (0.0, 0.0);
    }
    let mu = lambda * lambda * v;
    gauss_pieces(|s| (-mu * s).exp() * (s - z + dz), &decay_breaks(z - dz, z, mu))
}

/// Weight of the node `lambda = 1`: the exact `int_1^2 dl / sqrt(l^2 - 1)`
/// minus its `n0`-point midpoint sum.
pub fn omega0_series(n0: usize) -> f64 {
    let h = 1.0 / n0 as f64;
    let tail: f64 = (0..n0)
        .map(|n| {
            let l = 1.0 + (n as f64 + 0.5) * h;
            h / (l * l - 1.0).sqrt()
        })
        .sum();
    (2.0 + 3f64.sqrt()).ln() - tail
}

/// Subnormal-range moments carry no relative precision.
pub const TINY: f64 = 1e-280;

/// `|closed - exact| / scale`, or zero when the scale has underflowed.
pub fn rel_err(closed: f64, (exact, scale): (f64, f64)) -> f64 {
    if scale > TINY {
        (closed - exact).abs() / scale
    } else {
        0.0
    }
}
