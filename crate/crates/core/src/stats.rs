//! Empirical distributions, percentiles and Kolmogorov-Smirnov distance.

use crate::error::{Error, Result};

/// Anything with a cumulative distribution function.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Cdf for F {
    fn cdf(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Sorted sample set with step-function cdf `#(samples <= t) / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Sorts `samples`; NaNs are rejected as invalid.
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(&bad) = samples.iter().find(|x| x.is_nan()) {
            return Err(Error::InvalidParameter {
                name: "sample",
                value: bad,
                reason: "samples must not be NaN",
            });
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.count() as f64
    }

    /// Order statistic at 1-based rank `ceil(p n)`, no interpolation.
    pub fn percentile(&self, p: f64) -> f64 {
        assert!(p > 0.0 && p < 1.0, "percentile level {p} outside (0,1)");
        let n = self.count();
        let rank = ((p * n as f64).ceil() as usize).clamp(1, n);
        self.samples[rank - 1]
    }

    /// Fraction of samples `<= t`.
    pub fn cdf(&self, t: f64) -> f64 {
        let below = self.samples.partition_point(|&x| x <= t);
        below as f64 / self.count() as f64
    }

    /// Largest `F_hat(x) - F(x)` over sample points: how far the empirical
    /// law lies above a reference (positive means the reference is not a
    /// pointwise upper envelope there).
    pub fn max_excess_over(&self, reference: &impl Cdf) -> f64 {
        let n = self.count() as f64;
        let mut worst = f64::NEG_INFINITY;
        for (i, &x) in self.samples.iter().enumerate() {
            // only the last of a run of ties carries the full step
            if self.samples.get(i + 1) == Some(&x) {
                continue;
            }
            worst = worst.max((i + 1) as f64 / n - reference.cdf(x));
        }
        worst
    }
}

impl Cdf for EmpiricalDistribution {
    fn cdf(&self, x: f64) -> f64 {
        EmpiricalDistribution::cdf(self, x)
    }
}

/// `sup_t |F_hat(t) - F(t)|` for a continuous reference `F`, evaluated at
/// the sample points on both sides of every step.
pub fn ks_distance(emp: &EmpiricalDistribution, reference: &impl Cdf) -> f64 {
    let n = emp.count() as f64;
    let s = emp.samples();
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        let x = s[i];
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == x {
            j += 1;
        }
        let f = reference.cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    d
}

/// Asymptotic 95% KS critical value `1.36 / sqrt(n)`.
pub fn ks_critical_95(n: usize) -> f64 {
    1.36 / (n as f64).sqrt()
}

/// Binomial standard deviation of a success fraction over `n` trials.
pub fn binomial_sd(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// `n` points from `lo` to `hi` evenly spaced in log scale.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}
