//! D/M/1 building blocks for a single path.
//!
//! With deterministic arrivals every `d` time units and exponential service
//! at rate `m`, the number of packets found by an arrival is geometric with
//! parameter `sigma`, the root in (0,1) of `x = exp(a (x - 1))`, `a = m d`.
//! The sojourn time of a packet is then exponential with rate `m (1 - sigma)`.

use crate::error::{Error, Result};

/// Residual guaranteed by [`solve_sigma`].
pub const SIGMA_TOLERANCE: f64 = 1e-12;

/// Erlang fixed point of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaRoot {
    a: f64,
    sigma: f64,
    residual: f64,
}

impl SigmaRoot {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// Solves `x = exp(a (x - 1))` for its root in (0,1); requires `a > 1`.
///
/// Newton's method on `g(x) = x - exp(a(x-1))` started at `exp(-a)`: `g` is
/// concave and increasing left of the root, so the iterates increase
/// monotonically and never overshoot.
pub fn solve_sigma(a: f64) -> Result<SigmaRoot> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::SigmaDomain(a));
    }
    let map = |x: f64| (a * (x - 1.0)).exp();
    let mut x = (-a).exp();
    for _ in 0..500 {
        let e = map(x);
        let g = x - e;
        let dg = 1.0 - a * e;
        if dg <= 0.0 {
            break;
        }
        let next = x - g / dg;
        // also stops on NaN
        if next.partial_cmp(&x) != Some(std::cmp::Ordering::Greater) {
            break;
        }
        let done = next - x <= 1e-17 * next.max(1e-300);
        x = next;
        if done {
            break;
        }
    }
    // a few fixed-point sweeps cannot hurt: the map is a contraction near the root
    for _ in 0..4 {
        let e = map(x);
        if (e - x).abs() < f64::EPSILON * x {
            break;
        }
        if e < 1.0 {
            x = e;
        }
    }
    let residual = (x - map(x)).abs();
    debug_assert!(x > 0.0 && x < 1.0, "sigma {x} outside (0,1) for a = {a}");
    Ok(SigmaRoot {
        a,
        sigma: x,
        residual,
    })
}

/// Probability that an arrival finds `q` packets in the system.
pub fn queue_state_pmf(sigma: &SigmaRoot, q: u32) -> f64 {
    let s = sigma.sigma;
    (1.0 - s) * s.powi(q as i32)
}

/// Sojourn-time density of a delivered packet, rate `mu_eff (1 - sigma)`.
pub fn dm1_latency_pdf(mu_eff: f64, sigma: &SigmaRoot, t: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let r = mu_eff * (1.0 - sigma.sigma);
    r * (-r * t).exp()
}

pub fn dm1_latency_cdf(mu_eff: f64, sigma: &SigmaRoot, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let r = mu_eff * (1.0 - sigma.sigma);
    -(-r * t).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::gauss5_composite;

    /// Plain fixed-point iteration from 0.5, independent of the solver.
    fn oracle(a: f64) -> f64 {
        let mut x: f64 = 0.5;
        for _ in 0..1_000_000 {
            let next = (a * (x - 1.0)).exp();
            if (next - x).abs() < 1e-15 {
                return next;
            }
            x = next;
        }
        x
    }

    const GRID: [f64; 7] = [1.01, 1.1, 1.5, 2.0, 4.0, 10.0, 50.0];

    #[test]
    fn oracle_values_match_frozen_constants() {
        // Frozen from the fixed-point oracle above.
        assert!((oracle(2.0) - 0.203_187_869_979_980).abs() < 1e-12);
        assert!((oracle(1.5) - 0.417_188_356_134_190).abs() < 1e-12);
    }

    #[test]
    fn solver_matches_oracle() {
        for a in [1.5, 2.0, 3.0, 4.0, 10.0] {
            let s = solve_sigma(a).unwrap();
            assert!((s.sigma() - oracle(a)).abs() < 1e-11, "a = {a}");
        }
    }

    #[test]
    fn residual_and_monotonicity_on_grid() {
        let mut prev = 1.0;
        for a in GRID {
            let s = solve_sigma(a).unwrap();
            assert!(s.residual() < SIGMA_TOLERANCE, "a = {a}: {}", s.residual());
            assert!(s.sigma() > 0.0 && s.sigma() < 1.0);
            assert!(s.sigma() < prev, "sigma not decreasing at a = {a}");
            prev = s.sigma();
        }
    }

    #[test]
    fn large_a_approaches_exp_minus_a() {
        let s = solve_sigma(20.0).unwrap();
        let target = (-20f64).exp();
        assert!((s.sigma() - target).abs() / target < 0.01);
    }

    #[test]
    fn rejects_unstable() {
        assert!(matches!(solve_sigma(1.0), Err(Error::SigmaDomain(_))));
        assert!(solve_sigma(0.5).is_err());
        assert!(solve_sigma(f64::NAN).is_err());
    }

    #[test]
    fn pmf_is_geometric() {
        let s = solve_sigma(2.0).unwrap();
        assert!((queue_state_pmf(&s, 0) - 0.796_812_130_020_020).abs() < 1e-12);
        assert!(queue_state_pmf(&s, 200) < 1e-100);
        let total: f64 = (0..200).map(|q| queue_state_pmf(&s, q)).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn latency_law() {
        let s = solve_sigma(2.0).unwrap();
        assert!((dm1_latency_pdf(1.0, &s, 0.0) - 0.796_812_130_020_020).abs() < 1e-12);
        assert_eq!(dm1_latency_pdf(1.0, &s, -1.0), 0.0);
        assert_eq!(dm1_latency_cdf(1.0, &s, -1.0), 0.0);
        assert!((dm1_latency_cdf(1.0, &s, 1e3) - 1.0).abs() < 1e-15);
        for a in GRID {
            let s = solve_sigma(a).unwrap();
            let rate = 1.0 - s.sigma();
            let tmax = 40.0 / rate;
            let mass = gauss5_composite(0.0, tmax, 4000, |t| dm1_latency_pdf(1.0, &s, t));
            assert!((mass - 1.0).abs() < 1e-8, "a = {a}: {mass}");
            let mean = gauss5_composite(0.0, tmax, 4000, |t| t * dm1_latency_pdf(1.0, &s, t));
            assert!((mean * rate - 1.0).abs() < 1e-6);
        }
    }
}
