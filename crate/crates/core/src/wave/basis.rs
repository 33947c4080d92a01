//! Closed-form moments of the hat functions against the wave kernels.
//!
//! The hat function of node `i` factors as `a_i(x) b_i(z) / (dx dz)`. The
//! x-factor is integrated against `cos(lambda v x)` and the z-factor against
//! `exp(-lambda^2 v z)`, one half-support at a time. Every value is evaluated
//! through scaled moments on `[0, 1]` so that the small-argument limits
//! (`lambda v dx -> 0`, `lambda^2 v dz -> 0`) do not cancel catastrophically
//! and large arguments never overflow.

/// Below this argument the moments are summed from their Taylor series.
const SERIES_CUTOFF: f64 = 1.0;

/// `(int_0^1 t cos(u t) dt, int_0^1 t sin(u t) dt)`.
fn trig_moments(u: f64) -> (f64, f64) {
    if u.abs() < SERIES_CUTOFF {
        trig_moments_series(u)
    } else {
        trig_moments_closed(u)
    }
}

fn trig_moments_series(u: f64) -> (f64, f64) {
    {
        let u2 = u * u;
        let (mut c, mut s) = (0.0, 0.0);
        // term_m = (-1)^m u^(2m) / (2m)!
        let mut term = 1.0;
        for m in 0..12 {
            let m2 = 2.0 * m as f64;
            c += term / (m2 + 2.0);
            s += term * u / ((m2 + 1.0) * (m2 + 3.0));
            term *= -u2 / ((m2 + 1.0) * (m2 + 2.0));
        }
        (c, s)
    }
}

fn trig_moments_closed(u: f64) -> (f64, f64) {
    let (sn, cs) = u.sin_cos();
    ((cs + u * sn - 1.0) / (u * u), (sn - u * cs) / (u * u))
}

/// `int_0^1 exp(-w t) (1 - t) dt`.
fn exp_moment_falling(w: f64) -> f64 {
    if w < SERIES_CUTOFF {
        exp_moment_falling_series(w)
    } else {
        (w + (-w).exp_m1()) / (w * w)
    }
}

fn exp_moment_falling_series(w: f64) -> f64 {
    {
        let mut sum = 0.0;
        let mut term = 1.0; // (-w)^n / n!
        for n in 0..20 {
            let nf = n as f64;
            sum += term / ((nf + 1.0) * (nf + 2.0));
            term *= -w / (nf + 1.0);
        }
        sum
    }
}

/// `int_0^1 exp(-w t) t dt`.
fn exp_moment_rising(w: f64) -> f64 {
    if w < SERIES_CUTOFF {
        exp_moment_rising_series(w)
    } else {
        (1.0 - (-w).exp() * (1.0 + w)) / (w * w)
    }
}

fn exp_moment_rising_series(w: f64) -> f64 {
    {
        let mut sum = 0.0;
        let mut term = 1.0;
        for n in 0..20 {
            let nf = n as f64;
            sum += term / (nf + 2.0);
            term *= -w / (nf + 1.0);
        }
        sum
    }
}

/// `int_{x_i}^{x_i+dx} cos(lambda v x) (x_i + dx - x) dx`.
pub fn a_plus(lambda: f64, v: f64, x_i: f64, dx: f64) -> f64 {
    let k = lambda * v;
    let (c, s) = trig_moments(k * dx);
    let (sn, cs) = (k * (x_i + dx)).sin_cos();
    dx * dx * (cs * c + sn * s)
}

/// `int_{x_i-dx}^{x_i} cos(lambda v x) (x - x_i + dx) dx`.
pub fn a_minus(lambda: f64, v: f64, x_i: f64, dx: f64) -> f64 {
    let k = lambda * v;
    let (c, s) = trig_moments(k * dx);
    let (sn, cs) = (k * (x_i - dx)).sin_cos();
    dx * dx * (cs * c - sn * s)
}

/// `a_plus + a_minus = dx^2 cos(lambda v x_i) sinc^2(lambda v dx / 2)`.
pub fn a_sum(lambda: f64, v: f64, x_i: f64, dx: f64) -> f64 {
    let k = lambda * v;
    let half = 0.5 * k * dx;
    let sinc = if half.abs() < 1e-4 { 1.0 - half * half / 6.0 } else { half.sin() / half };
    dx * dx * (k * x_i).cos() * sinc * sinc
}

/// `int_{z_i}^{z_i+dz} exp(-lambda^2 v z) (z_i + dz - z) dz`.
pub fn b_plus(lambda: f64, v: f64, z_i: f64, dz: f64) -> f64 {
    let mu = lambda * lambda * v;
    dz * dz * (-mu * z_i).exp() * exp_moment_falling(mu * dz)
}

/// `int_{z_i-dz}^{z_i} exp(-lambda^2 v z) (z - z_i + dz) dz`; zero on the waterline.
pub fn b_minus(lambda: f64, v: f64, z_i: f64, dz: f64) -> f64 {
    if z_i <= 0.0 {
        return 0.0;
    }
    let mu = lambda * lambda * v;
    dz * dz * (-mu * (z_i - dz).max(0.0)).exp() * exp_moment_rising(mu * dz)
}
