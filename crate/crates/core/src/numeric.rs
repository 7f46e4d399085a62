//! Small quadrature and root-bracketing helpers shared by the analytic modules.

// 5-point Gauss-Legendre on [-1, 1].
const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Integrates `f` over `[a, b]` with a single 5-point Gauss-Legendre rule.
pub(crate) fn gauss5(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// `(integral of f, integral of x f)` over `[a, b]` from one set of
/// 5-point Gauss-Legendre evaluations.
pub(crate) fn gauss5_moments(a: f64, b: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    if b <= a {
        return (0.0, 0.0);
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let (mut m0, mut m1) = (0.0, 0.0);
    for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
        let t = mid + half * x;
        let v = w * f(t);
        m0 += v;
        m1 += v * t;
    }
    (m0 * half, m1 * half)
}

/// Composite 5-point Gauss-Legendre with `n` equal panels.
#[cfg(test)]
pub(crate) fn gauss5_composite(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    if b <= a || n == 0 {
        return 0.0;
    }
    let h = (b - a) / n as f64;
    (0..n)
        .map(|k| {
            let lo = a + k as f64 * h;
            gauss5(lo, lo + h, &f)
        })
        .sum()
}

/// Smallest `x` with `cdf(x) >= p`, found by bisection to `tol` absolute.
///
/// The upper bracket starts at `scale` and doubles until it covers `p`.
/// Returns `None` when the cdf never reaches `p` (defective distribution).
pub(crate) fn invert_monotone(
    cdf: impl Fn(f64) -> f64,
    p: f64,
    lo: f64,
    scale: f64,
    tol: f64,
) -> Option<f64> {
    let mut lo = lo;
    let mut step = scale.max(tol);
    let mut hi = lo + step;
    let mut grown = 0;
    while cdf(hi) < p {
        lo = hi;
        step *= 2.0;
        hi = lo + step;
        grown += 1;
        if grown > 200 || !hi.is_finite() {
            return None;
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) >= p {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}
