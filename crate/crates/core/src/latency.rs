//! Latency distributions of successfully delivered frames for each scheme.
//!
//! Every law here is a signed mixture of exponentials, so curves are stored
//! as `(weight, rate)` terms with `pdf(t) = sum w r exp(-r t)` and survival
//! `sum w exp(-r t)`. All curves are conditioned on frame success and
//! integrate to one.

use crate::error::{Error, Result};
use crate::model::{assert_stable, Quality, Scheme, SystemConfig};
use crate::numeric::invert_monotone;
use crate::queue::{solve_sigma, SigmaRoot};
use crate::stats::Cdf;

/// Absolute tolerance, in time units, of analytic percentile inversion.
pub const PERCENTILE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub weight: f64,
    pub rate: f64,
}

/// Latency law of delivered frames as a signed exponential mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionCurve {
    label: String,
    terms: Vec<ExpTerm>,
}

impl DistributionCurve {
    pub fn new(label: impl Into<String>, terms: Vec<ExpTerm>) -> Self {
        let terms = terms.into_iter().filter(|t| t.weight != 0.0).collect();
        DistributionCurve {
            label: label.into(),
            terms,
        }
    }

    /// Single exponential law with the given rate.
    pub fn exponential(label: impl Into<String>, rate: f64) -> Self {
        Self::new(label, vec![ExpTerm { weight: 1.0, rate }])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn support_lo(&self) -> f64 {
        0.0
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        self.terms
            .iter()
            .map(|c| c.weight * c.rate * (-c.rate * t).exp())
            .sum::<f64>()
            .max(0.0)
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        self.terms
            .iter()
            .map(|c| c.weight * (-c.rate * t).exp())
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        (1.0 - self.survival(t)).clamp(0.0, 1.0)
    }

    /// `ln P(T > t)`, finite even where every `exp(-r t)` underflows.
    pub fn log_survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let slowest = self.slowest_rate();
        let scaled: f64 = self
            .terms
            .iter()
            .map(|c| c.weight * (-(c.rate - slowest) * t).exp())
            .sum();
        -slowest * t + scaled.ln()
    }

    pub fn mean(&self) -> f64 {
        self.terms.iter().map(|c| c.weight / c.rate).sum()
    }

    pub fn slowest_rate(&self) -> f64 {
        self.terms
            .iter()
            .map(|c| c.rate)
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest `t` with `cdf(t) >= p`, to [`PERCENTILE_TOL`].
    pub fn percentile(&self, p: f64) -> f64 {
        assert!(p > 0.0 && p < 1.0, "percentile level {p} outside (0,1)");
        let target = (1.0 - p).ln();
        invert_monotone(
            |t| {
                if self.log_survival(t) <= target {
                    1.0
                } else {
                    self.cdf(t)
                }
            },
            p,
            0.0,
            self.mean(),
            PERCENTILE_TOL,
        )
        .expect("exponential mixtures reach every level below one")
    }
}

impl Cdf for DistributionCurve {
    fn cdf(&self, x: f64) -> f64 {
        DistributionCurve::cdf(self, x)
    }
}

/// Success probabilities and conditional delivery patterns of one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErasureWeights {
    /// At least one of the two packets survives: `1 - e1 e2`.
    pub ps_min: f64,
    /// Both survive, given at least one does.
    pub phi_12: f64,
    /// Only path 1 survives, given at least one does.
    pub phi_1: f64,
    /// Only path 2 survives, given at least one does.
    pub phi_2: f64,
    /// Both survive: `(1 - e1)(1 - e2)`.
    pub ps_max: f64,
}

pub fn erasure_weights(eps1: f64, eps2: f64) -> ErasureWeights {
    let ps_min = 1.0 - eps1 * eps2;
    ErasureWeights {
        ps_min,
        phi_12: (1.0 - eps1) * (1.0 - eps2) / ps_min,
        phi_1: (1.0 - eps1) * eps2 / ps_min,
        phi_2: (1.0 - eps2) * eps1 / ps_min,
        ps_max: (1.0 - eps1) * (1.0 - eps2),
    }
}

/// Erlang roots of both paths; rejects unstable configurations.
pub fn path_sigmas(cfg: &SystemConfig) -> Result<[SigmaRoot; 2]> {
    if cfg.scheme() == Scheme::QueueBased {
        return Err(Error::SimulationOnly(cfg.scheme()));
    }
    assert_stable(cfg)?;
    Ok([
        solve_sigma(cfg.sigma_coefficient(0))?,
        solve_sigma(cfg.sigma_coefficient(1))?,
    ])
}

/// Sojourn-time rates `(mu_j / L)(1 - sigma_j)` of both paths.
pub fn path_latency_rates(cfg: &SystemConfig) -> Result<[f64; 2]> {
    let s = path_sigmas(cfg)?;
    Ok([
        cfg.effective_rate(0) * (1.0 - s[0].sigma()),
        cfg.effective_rate(1) * (1.0 - s[1].sigma()),
    ])
}

fn require_alternating(cfg: &SystemConfig, operation: &'static str) -> Result<()> {
    match cfg.scheme() {
        Scheme::Alternating => Ok(()),
        Scheme::QueueBased => Err(Error::SimulationOnly(Scheme::QueueBased)),
        scheme => Err(Error::UnsupportedScheme { operation, scheme }),
    }
}

fn require_synchronized(cfg: &SystemConfig, operation: &'static str) -> Result<()> {
    match cfg.scheme() {
        s if s.is_synchronized() => Ok(()),
        Scheme::QueueBased => Err(Error::SimulationOnly(Scheme::QueueBased)),
        scheme => Err(Error::UnsupportedScheme { operation, scheme }),
    }
}

/// Alternating scheme: equal mixture of the two per-path sojourn laws.
///
/// Erasures remove whole frames and leave the delivered-frame law unchanged.
pub fn alt_latency(cfg: &SystemConfig) -> Result<DistributionCurve> {
    require_alternating(cfg, "alternating latency")?;
    let [r1, r2] = path_latency_rates(cfg)?;
    Ok(DistributionCurve::new(
        "alternating",
        vec![
            ExpTerm {
                weight: 0.5,
                rate: r1,
            },
            ExpTerm {
                weight: 0.5,
                rate: r2,
            },
        ],
    ))
}

/// First of two synchronized packets to arrive, error-free.
///
/// The two queues see the same deterministic arrivals but independent
/// services, so the minimum is exponential with rate `r1 + r2`.
pub fn min_latency(cfg: &SystemConfig) -> Result<DistributionCurve> {
    require_synchronized(cfg, "minimum system time")?;
    let [r1, r2] = path_latency_rates(cfg)?;
    Ok(DistributionCurve::exponential("min", r1 + r2))
}

/// First delivered packet of frames with at least one survivor.
///
/// Mixture over which packets survived: both (minimum law), only path 1,
/// or only path 2 (that path's marginal law), weighted by the `phi`s.
pub fn min_latency_err(cfg: &SystemConfig) -> Result<DistributionCurve> {
    require_synchronized(cfg, "error-prone minimum system time")?;
    let [r1, r2] = path_latency_rates(cfg)?;
    let [e1, e2] = cfg.epsilons();
    let w = erasure_weights(e1, e2);
    Ok(DistributionCurve::new(
        "min-err",
        vec![
            ExpTerm {
                weight: w.phi_12,
                rate: r1 + r2,
            },
            ExpTerm {
                weight: w.phi_1,
                rate: r1,
            },
            ExpTerm {
                weight: w.phi_2,
                rate: r2,
            },
        ],
    ))
}

/// Second of two synchronized packets: `P(T <= t) = P1(t) P2(t)`.
pub fn max_latency(cfg: &SystemConfig) -> Result<DistributionCurve> {
    require_synchronized(cfg, "maximum system time")?;
    let [r1, r2] = path_latency_rates(cfg)?;
    Ok(DistributionCurve::new(
        "max",
        vec![
            ExpTerm {
                weight: 1.0,
                rate: r1,
            },
            ExpTerm {
                weight: 1.0,
                rate: r2,
            },
            ExpTerm {
                weight: -1.0,
                rate: r1 + r2,
            },
        ],
    ))
}

/// Coded scheme, low quality (first descriptor) or high quality (both).
///
/// At `eta = 0.5` each descriptor already carries the full frame, so the
/// high-quality law is the replicated one.
pub fn coded_latency(cfg: &SystemConfig, quality: Quality) -> Result<DistributionCurve> {
    let Scheme::Coded { eta } = cfg.scheme() else {
        return Err(Error::UnsupportedScheme {
            operation: "coded latency",
            scheme: cfg.scheme(),
        });
    };
    cfg.scheme().check_quality(quality)?;
    let curve = match quality {
        Quality::Hq if eta.get() > 0.5 => max_latency(cfg)?,
        _ => min_latency_err(cfg)?,
    };
    Ok(DistributionCurve {
        label: format!("coded-{}", quality.label()),
        ..curve
    })
}

/// Delivered-frame latency law reported for `quality` of the configured scheme.
pub fn latency_curve(cfg: &SystemConfig, quality: Quality) -> Result<DistributionCurve> {
    let scheme = cfg.scheme();
    scheme.check_quality(quality)?;
    match scheme {
        Scheme::Alternating => alt_latency(cfg),
        Scheme::Replicated => min_latency_err(cfg),
        Scheme::Split => max_latency(cfg),
        Scheme::Coded { .. } => coded_latency(cfg, quality),
        Scheme::QueueBased => Err(Error::SimulationOnly(scheme)),
    }
}

/// Fraction of frames delivered at the given quality.
pub fn delivery_probability(scheme: Scheme, quality: Quality, eps1: f64, eps2: f64) -> Result<f64> {
    scheme.check_quality(quality)?;
    let w = erasure_weights(eps1, eps2);
    Ok(match scheme {
        Scheme::Alternating => 1.0 - 0.5 * (eps1 + eps2),
        Scheme::Replicated => w.ps_min,
        Scheme::Split => w.ps_max,
        Scheme::Coded { eta } => match quality {
            Quality::Hq if eta.get() > 0.5 => w.ps_max,
            _ => w.ps_min,
        },
        Scheme::QueueBased => return Err(Error::SimulationOnly(scheme)),
    })
}
