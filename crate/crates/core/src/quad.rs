//! Adaptive Gauss-Kronrod quadrature used by the reference evaluators.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.000_000_000_000_000_0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights on the odd Kronrod abscissae.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod estimate, the embedded 7-point Gauss error and the
/// Kronrod estimate of `int |f|`.
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let (lo, hi) = (f(c - dx), f(c + dx));
        kronrod += WGK[j] * (lo + hi);
        abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs(), abs * h.abs())
}

/// Error level below which a piece is limited by rounding, not by the rule.
const ROUNDOFF: f64 = 1e3 * f64::EPSILON;
/// Relative error below which a piece whose error stopped shrinking is taken
/// to sit on the noise floor of `f` itself.
const NOISE: f64 = 1e-10;
/// Cap on the number of accepted pieces per call.
const MAX_PIECES: usize = 1 << 20;

/// Integrates `f` over `[a, b]` by recursive bisection until each piece meets
/// `max(abs_tol, rel_tol |I|)` scaled by its share of the interval.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (whole, _, _) = gk15(&mut f, a, b);
    let target = abs_tol.max(rel_tol * whole.abs());
    let mut total = 0.0;
    let mut stack = vec![(a, b, 0u32, f64::INFINITY)];
    let mut accepted = 0;
    while let Some((lo, hi, depth, parent_err)) = stack.pop() {
        let (est, err, abs) = gk15(&mut f, lo, hi);
        let share = target * (hi - lo) / (b - a);
        let stalled = err <= NOISE * abs && err > 0.25 * parent_err;
        let exhausted = accepted >= MAX_PIECES || depth >= 40 || hi - lo <= 1e-14 * (b - a).abs();
        if err <= share || err <= ROUNDOFF * abs || stalled || exhausted {
            total += est;
            accepted += 1;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1, err));
            stack.push((lo, mid, depth + 1, err));
        }
    }
    total
}

/// Integrates over consecutive pieces `[breaks[k], breaks[k+1]]`.
pub fn integrate_pieces(mut f: impl FnMut(f64) -> f64, breaks: &[f64], abs_tol: f64, rel_tol: f64) -> f64 {
    let pieces = breaks.len().saturating_sub(1).max(1) as f64;
    breaks
        .windows(2)
        .map(|w| integrate(&mut f, w[0], w[1], abs_tol / pieces, rel_tol))
        .sum()
}
