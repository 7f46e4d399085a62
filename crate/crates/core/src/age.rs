//! Peak age of information (PAoI) distributions.
//!
//! PAoI is sampled at every informative reception: the reception time of a
//! frame fresher than anything displayed so far, minus the generation time
//! of the frame it replaces.
//!
//! Synchronized schemes have no reordering among successful frames, so the
//! PAoI is the latency plus one period per consecutive failed frame plus
//! one. The alternating scheme can reorder: a frame overtaken by its
//! successor on the other path is never displayed, and a displayed frame
//! replaces either its predecessor or the frame two periods older.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::latency::{delivery_probability, latency_curve, path_sigmas, DistributionCurve};
use crate::model::{Quality, Scheme, SystemConfig};
use crate::numeric::{gauss5, gauss5_moments, invert_monotone};
use crate::stats::Cdf;

/// Absolute tolerance, in time units, of PAoI percentile inversion.
pub const PERCENTILE_TOL: f64 = 1e-9;

// geometric weights below this are dropped from failure sums
const NEGLIGIBLE: f64 = 1e-18;
const MAX_PANELS: f64 = 400_000.0;

/// Closed-form family a [`PaoiCurve`] evaluates.
#[derive(Debug, Clone)]
pub enum PaoiKind {
    /// Failure convolution of a synchronized latency law.
    Synchronized {
        p_s: f64,
        latency: DistributionCurve,
    },
    /// Exact error-free alternating law.
    Alternating(AltModel),
    /// Stochastic lower bound for the error-prone alternating scheme.
    AlternatingBound(AltModel),
    /// The same bound with the mixture weights exactly as usually printed.
    /// Its density integrates to more than one when erasures are present;
    /// kept for comparison only.
    AlternatingBoundPrinted(AltModel),
}

/// Per-path parameters of the alternating scheme (index 0 and 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltModel {
    tau: f64,
    mu: [f64; 2],
    sigma: [f64; 2],
    rate: [f64; 2],
    eps: [f64; 2],
}

#[derive(Debug, Clone)]
struct CdfTable {
    step: f64,
    cumulative: Vec<f64>,
    moment: Vec<f64>,
}

/// PAoI law with numerically integrated cdf.
pub struct PaoiCurve {
    label: String,
    tau: f64,
    is_lower_bound: bool,
    kind: PaoiKind,
    table: OnceLock<CdfTable>,
}

impl Clone for PaoiCurve {
    fn clone(&self) -> Self {
        PaoiCurve {
            label: self.label.clone(),
            tau: self.tau,
            is_lower_bound: self.is_lower_bound,
            kind: self.kind.clone(),
            table: self.table.clone(),
        }
    }
}

impl fmt::Debug for PaoiCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PaoiCurve")
            .field("label", &self.label)
            .field("tau", &self.tau)
            .field("is_lower_bound", &self.is_lower_bound)
            .field("kind", &self.kind)
            .finish()
    }
}

impl PaoiCurve {
    fn new(label: impl Into<String>, tau: f64, is_lower_bound: bool, kind: PaoiKind) -> Self {
        PaoiCurve {
            label: label.into(),
            tau,
            is_lower_bound,
            kind,
            table: OnceLock::new(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_lower_bound(&self) -> bool {
        self.is_lower_bound
    }

    pub fn kind(&self) -> &PaoiKind {
        &self.kind
    }

    pub fn pdf(&self, delta: f64) -> f64 {
        match &self.kind {
            PaoiKind::Synchronized { p_s, latency } => sync_density(*p_s, latency, self.tau, delta),
            PaoiKind::Alternating(m) => m.exact_pdf(delta),
            PaoiKind::AlternatingBound(m) => m.bound_pdf(delta),
            PaoiKind::AlternatingBoundPrinted(m) => m.printed_bound_pdf(delta),
        }
    }

    /// One-sided limits `(left, right)` of the density at `delta`.
    ///
    /// Only the alternating laws switch formula inside the support (at
    /// `2 tau`); elsewhere both limits coincide with [`PaoiCurve::pdf`] up
    /// to a nudge of one ulp.
    pub fn pdf_limits(&self, delta: f64) -> (f64, f64) {
        match &self.kind {
            PaoiKind::Alternating(m) => (m.exact_pdf_branch(delta, false), m.exact_pdf_branch(delta, true)),
            _ => (self.pdf(delta - delta.abs() * 1e-15), self.pdf(delta)),
        }
    }

    /// Cumulative distribution. Synchronized curves use the closed form
    /// `p_s sum (1-p_s)^f P_T(delta - (f+1) tau)`; alternating curves
    /// integrate the density piecewise.
    pub fn cdf(&self, delta: f64) -> f64 {
        match &self.kind {
            PaoiKind::Synchronized { p_s, latency } => {
                if delta < self.tau {
                    return 0.0;
                }
                let periods = (delta / self.tau).floor() as usize;
                let mut weight = *p_s;
                let mut acc = 0.0;
                for f in 0..periods {
                    acc += weight * latency.cdf(delta - (f + 1) as f64 * self.tau);
                    weight *= 1.0 - p_s;
                    if weight < NEGLIGIBLE {
                        break;
                    }
                }
                acc.min(1.0)
            }
            _ => self.integrated_cdf(delta),
        }
    }

    /// Numeric integral of the density from 0 to `delta`.
    pub fn integrated_cdf(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        let table = self.table();
        let k = (delta / table.step).floor() as usize;
        if k + 1 >= table.cumulative.len() {
            return *table.cumulative.last().unwrap();
        }
        let lo = k as f64 * table.step;
        table.cumulative[k] + gauss5(lo, delta, |x| self.pdf(x))
    }

    /// Total mass of the density over the tabulated support.
    pub fn total_mass(&self) -> f64 {
        *self.table().cumulative.last().unwrap()
    }

    /// Mean from numeric integration of `delta * pdf(delta)`.
    pub fn mean(&self) -> f64 {
        *self.table().moment.last().unwrap()
    }

    /// Smallest `delta` with `cdf(delta) >= p` to [`PERCENTILE_TOL`];
    /// infinite if the curve never reaches `p`.
    pub fn percentile(&self, p: f64) -> f64 {
        assert!(p > 0.0 && p < 1.0, "percentile level {p} outside (0,1)");
        invert_monotone(|d| self.cdf(d), p, 0.0, self.tau, PERCENTILE_TOL).unwrap_or(f64::INFINITY)
    }

    fn table(&self) -> &CdfTable {
        self.table.get_or_init(|| self.build_table())
    }

    /// `(slowest decay rate, fastest rate, per-period failure factor)`.
    fn tail_parameters(&self) -> (f64, f64, f64) {
        match &self.kind {
            PaoiKind::Synchronized { p_s, latency } => {
                let fastest = latency.terms().iter().map(|t| t.rate).fold(0.0, f64::max);
                (latency.slowest_rate(), fastest, 1.0 - p_s)
            }
            PaoiKind::Alternating(m) | PaoiKind::AlternatingBound(m) | PaoiKind::AlternatingBoundPrinted(m) => (
                m.rate[0].min(m.rate[1]),
                m.mu[0].max(m.mu[1]),
                m.eps[0].max(m.eps[1]),
            ),
        }
    }

    fn build_table(&self) -> CdfTable {
        let (slowest, fastest, per_period) = self.tail_parameters();
        let periods = if per_period > 0.0 {
            (NEGLIGIBLE.ln() / per_period.ln()).ceil()
        } else {
            0.0
        };
        let horizon = self.tau * (periods + 3.0) + 45.0 / slowest;
        // panels divide tau exactly so every kink at a multiple of tau is a
        // node, and are short against the fastest exponential
        let wanted = (4.0 * self.tau * fastest).ceil().max(4.0);
        let per_tau = wanted.min((MAX_PANELS * self.tau / horizon).floor()).max(4.0) as usize;
        let step = self.tau / per_tau as f64;
        let panels = (horizon / step).ceil() as usize;
        let mut cumulative = Vec::with_capacity(panels + 1);
        let mut moment = Vec::with_capacity(panels + 1);
        let (mut c, mut m) = (0.0, 0.0);
        cumulative.push(0.0);
        moment.push(0.0);
        for k in 0..panels {
            let lo = k as f64 * step;
            let hi = (k + 1) as f64 * step;
            let (dc, dm) = gauss5_moments(lo, hi, |x| self.pdf(x));
            c += dc;
            m += dm;
            cumulative.push(c);
            moment.push(m);
        }
        CdfTable {
            step,
            cumulative,
            moment,
        }
    }
}

impl Cdf for PaoiCurve {
    fn cdf(&self, x: f64) -> f64 {
        PaoiCurve::cdf(self, x)
    }
}

fn sync_density(p_s: f64, latency: &DistributionCurve, tau: f64, delta: f64) -> f64 {
    if delta < tau {
        return 0.0;
    }
    let periods = (delta / tau).floor() as usize;
    let mut weight = p_s;
    let mut acc = 0.0;
    for f in 0..periods {
        acc += weight * latency.pdf(delta - (f + 1) as f64 * tau);
        weight *= 1.0 - p_s;
        if weight < NEGLIGIBLE {
            break;
        }
    }
    acc
}

/// PAoI density of a synchronized scheme with success probability `p_s`
/// and delivered-frame latency law `latency`.
///
/// `f` consecutive failures before a delivered frame add `f + 1` periods
/// to its latency; the sum over `f` has `floor(delta / tau)` terms.
pub fn sync_paoi_pdf(p_s: f64, latency: &DistributionCurve, tau: f64, delta: f64) -> Result<f64> {
    if p_s == 0.0 {
        return Err(Error::NoDelivery);
    }
    if !(p_s > 0.0 && p_s <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "p_s",
            value: p_s,
            reason: "success probability must lie in (0, 1]",
        });
    }
    Ok(sync_density(p_s, latency, tau, delta))
}

/// PAoI of a synchronized scheme at the given quality.
pub fn sync_paoi(cfg: &SystemConfig, quality: Quality) -> Result<PaoiCurve> {
    let scheme = cfg.scheme();
    if !scheme.is_synchronized() {
        return Err(match scheme {
            Scheme::QueueBased => Error::SimulationOnly(scheme),
            _ => Error::UnsupportedScheme {
                operation: "synchronized PAoI",
                scheme,
            },
        });
    }
    let latency = latency_curve(cfg, quality)?;
    let [e1, e2] = cfg.epsilons();
    let p_s = delivery_probability(scheme, quality, e1, e2)?;
    if p_s <= 0.0 {
        return Err(Error::NoDelivery);
    }
    let label = match scheme {
        Scheme::Coded { .. } => format!("coded-{}", quality.label()),
        s => s.label().to_string(),
    };
    Ok(PaoiCurve::new(
        label,
        cfg.tau(),
        false,
        PaoiKind::Synchronized { p_s, latency },
    ))
}

impl AltModel {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        match cfg.scheme() {
            Scheme::Alternating => {}
            Scheme::QueueBased => return Err(Error::SimulationOnly(Scheme::QueueBased)),
            scheme => {
                return Err(Error::UnsupportedScheme {
                    operation: "alternating PAoI",
                    scheme,
                })
            }
        }
        let s = path_sigmas(cfg)?;
        let mu = cfg.mus();
        let sigma = [s[0].sigma(), s[1].sigma()];
        Ok(AltModel {
            tau: cfg.tau(),
            mu,
            sigma,
            rate: [mu[0] * (1.0 - sigma[0]), mu[1] * (1.0 - sigma[1])],
            eps: cfg.epsilons(),
        })
    }

    /// Error-free probability that a frame on path `j` is not overtaken by
    /// its successor on the other path.
    pub fn relevance(&self, j: usize) -> f64 {
        let (r, ro) = (self.rate[j], self.rate[1 - j]);
        1.0 - (-r * self.tau).exp() * (1.0 - r / (r + ro))
    }

    /// Joint density of "displayed" and PAoI `delta` for a path-`j` frame
    /// whose two neighbours on the other path are delivered.
    ///
    /// On `[tau, 2 tau)` the predecessor must have arrived first. Beyond
    /// `2 tau` three cases add up: predecessor arrived first and successor
    /// did not overtake (split on whether the successor found the
    /// predecessor still queued), or predecessor arrived late so the age is
    /// measured from the frame two periods back.
    fn joint_displayed(&self, j: usize, delta: f64, upper_branch: bool) -> f64 {
        let tau = self.tau;
        if delta < tau {
            return 0.0;
        }
        let o = 1 - j;
        let (r, ro, muo, so) = (self.rate[j], self.rate[o], self.mu[o], self.sigma[o]);
        let head = r * (-r * (delta - tau)).exp();
        if !upper_branch {
            return head * -(-ro * delta).exp_m1();
        }
        let late_pred = r * (-r * (delta - 2.0 * tau) - ro * (delta - tau)).exp();
        let idle_succ = head * -(-2.0 * ro * tau).exp_m1() * (-muo * (delta - 2.0 * tau)).exp();
        let queued_succ = head * (1.0 - so) / so
            * (-muo * delta + 2.0 * muo * so * tau).exp()
            * (muo * so * (delta - 2.0 * tau)).exp_m1();
        late_pred + idle_succ + queued_succ
    }

    /// Density of PAoI `delta` for a delivered path-`j` frame with its
    /// predecessor delivered, ignoring whether it is displayed, weighted by
    /// the chance that no later other-path frame overtakes it given that
    /// the immediate successor was erased.
    fn joint_erased_successor(&self, j: usize, delta: f64) -> f64 {
        let tau = self.tau;
        if delta < tau {
            return 0.0;
        }
        let o = 1 - j;
        let (r, ro) = (self.rate[j], self.rate[o]);
        let t = delta - tau;
        let mut v = r * (-r * t).exp() * -(-ro * delta).exp_m1() * self.chained_relevance(j, t, 2);
        if delta >= 2.0 * tau {
            let t = delta - 2.0 * tau;
            v += r * (-r * t - ro * (delta - tau)).exp() * self.chained_relevance(j, t, 2);
        }
        v
    }

    /// Probability that a path-`j` frame with latency `t` is not overtaken
    /// by any other-path frame `i + 2k - 1`, `k >= first`, given frames
    /// `i + 1 .. i + 2 first - 3` on that path were erased.
    ///
    /// Departures on one FCFS path are ordered, so the number of those
    /// frames leaving before the reception has tail `P_T(t - (2k-1) tau)`,
    /// and every one of them must have been erased.
    fn chained_relevance(&self, j: usize, t: f64, first: usize) -> f64 {
        let o = 1 - j;
        let (ro, eo, tau) = (self.rate[o], self.eps[o], self.tau);
        let x0 = t - (2 * first - 1) as f64 * tau;
        if x0 <= 0.0 {
            return 1.0;
        }
        // terms k = first.. with a positive argument, cut where eo^m is negligible
        let mut n = ((x0 / (2.0 * tau)).ceil() as usize).max(1);
        if (first + n - 1) as f64 * 2.0 * tau - tau >= t {
            n -= 1;
        }
        if eo < 1.0 {
            let cut = if eo > 0.0 { (NEGLIGIBLE.ln() / eo.ln()).ceil() as usize } else { 1 };
            n = n.min(cut.max(1));
        }
        // geometric closed form: sum eo^m (1 - exp(-ro (x0 - 2 m tau)))
        let q = eo * (2.0 * ro * tau).exp();
        let acc = if eo == 0.0 {
            -(-ro * x0).exp_m1()
        } else if (q - 1.0).abs() < 1e-6 || n < 4 {
            (0..n)
                .map(|m| eo.powi(m as i32) * -(-ro * (x0 - 2.0 * m as f64 * tau)).exp_m1())
                .sum()
        } else {
            let nf = n as f64;
            let plain = -(nf * eo.ln()).exp_m1() / (1.0 - eo);
            let head = (-ro * x0).exp();
            let last = (nf * eo.ln() - ro * (x0 - 2.0 * nf * tau)).exp();
            plain - (last - head) / (q - 1.0)
        };
        1.0 - (1.0 - eo) * acc
    }

    /// Probability that a delivered path-`j` frame is displayed under the
    /// erasure-chained relevance model (equals [`AltModel::relevance`] when
    /// the other path is error-free).
    pub fn chained_relevance_probability(&self, j: usize) -> f64 {
        let o = 1 - j;
        let (r, ro, eo) = (self.rate[j], self.rate[o], self.eps[o]);
        1.0 - (1.0 - eo) * ro / (r + ro) * (-r * self.tau).exp() / (1.0 - eo * (-2.0 * r * self.tau).exp())
    }

    /// `(floor(f/2), ceil(f/2))` failures land on (own, other) path.
    fn failure_run(&self, j: usize, f: usize) -> f64 {
        let o = 1 - j;
        self.eps[j].powi((f / 2) as i32) * self.eps[o].powi(f.div_ceil(2) as i32)
    }

    fn exact_pdf_branch(&self, delta: f64, upper: bool) -> f64 {
        let num: f64 = (0..2).map(|j| self.joint_displayed(j, delta, upper)).sum();
        num / (self.relevance(0) + self.relevance(1))
    }

    fn exact_pdf(&self, delta: f64) -> f64 {
        self.exact_pdf_branch(delta, delta >= 2.0 * self.tau)
    }

    fn bound_numerator(&self, j: usize, delta: f64) -> f64 {
        let o = 1 - j;
        let (ej, eo, r, tau) = (self.eps[j], self.eps[o], self.rate[j], self.tau);
        let upper = delta >= 2.0 * tau;
        let no_failure = (1.0 - eo)
            * ((1.0 - eo) * self.joint_displayed(j, delta, upper) + eo * self.joint_erased_successor(j, delta));
        let mut failures = 0.0;
        let mut f = 1;
        loop {
            let t = delta - (f + 1) as f64 * tau;
            if t < 0.0 {
                break;
            }
            let run = self.failure_run(j, f);
            if run < NEGLIGIBLE {
                break;
            }
            let terminator = if f % 2 == 1 { 1.0 - ej } else { 1.0 - eo };
            failures += run * terminator * r * (-r * t).exp() * self.chained_relevance(j, t, 1);
            f += 1;
        }
        (1.0 - ej) * (no_failure + failures)
    }

    fn bound_pdf(&self, delta: f64) -> f64 {
        let den = (1.0 - self.eps[0]) * self.chained_relevance_probability(0)
            + (1.0 - self.eps[1]) * self.chained_relevance_probability(1);
        (self.bound_numerator(0, delta) + self.bound_numerator(1, delta)) / den
    }

    fn printed_conditioned_latency(&self, j: usize, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let o = 1 - j;
        let (r, ro, eo) = (self.rate[j], self.rate[o], self.eps[o]);
        let survive = if t >= self.tau { (-ro * (t - self.tau)).exp() } else { 1.0 };
        r * (-r * t).exp() * (eo + (1.0 - eo) * survive) / (eo + (1.0 - eo) * self.relevance(j))
    }

    fn printed_bound_pdf(&self, delta: f64) -> f64 {
        let tau = self.tau;
        let upper = delta >= 2.0 * tau;
        let mut num = 0.0;
        for j in 0..2 {
            let o = 1 - j;
            let (ej, eo) = (self.eps[j], self.eps[o]);
            let mut sum = 0.0;
            let last = (delta / tau).floor() as usize;
            for f in 1..=last {
                sum += self.printed_conditioned_latency(j, delta - (f + 1) as f64 * tau) * self.failure_run(j, f);
            }
            num += (1.0 - ej) * ((1.0 - eo) * self.joint_displayed(j, delta, upper) + sum);
        }
        let den: f64 = (0..2)
            .map(|j| {
                let eo = self.eps[1 - j];
                (1.0 - self.eps[j]) * (eo + (1.0 - eo) * self.relevance(j))
            })
            .sum();
        num / den
    }
}

/// Error-free relevance probabilities `(p_r1, p_r2)` of the alternating scheme.
pub fn alt_relevance_probability(cfg: &SystemConfig) -> Result<(f64, f64)> {
    let m = AltModel::new(cfg)?;
    Ok((m.relevance(0), m.relevance(1)))
}

/// Exact PAoI of the error-free alternating scheme.
pub fn alt_paoi(cfg: &SystemConfig) -> Result<PaoiCurve> {
    if !cfg.is_error_free() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: cfg.epsilons()[0].max(cfg.epsilons()[1]),
            reason: "the exact alternating PAoI needs error-free paths; use the lower bound",
        });
    }
    let m = AltModel::new(cfg)?;
    Ok(PaoiCurve::new("alternating", cfg.tau(), false, PaoiKind::Alternating(m)))
}

/// Lower bound on the error-prone alternating PAoI (`is_lower_bound`).
///
/// Assumes that when a frame arrives, the frame three periods older has
/// already arrived on the other path: at most two consecutive frames are
/// out of order. Ages are therefore never overestimated and the curve's
/// cdf lies above the true one; it is tight at low load.
pub fn alt_paoi_bound(cfg: &SystemConfig) -> Result<PaoiCurve> {
    let m = AltModel::new(cfg)?;
    Ok(PaoiCurve::new("alternating-bound", cfg.tau(), true, PaoiKind::AlternatingBound(m)))
}

/// The bound with its commonly printed mixture weights (not normalized
/// when erasures are present).
pub fn alt_paoi_bound_printed(cfg: &SystemConfig) -> Result<PaoiCurve> {
    let m = AltModel::new(cfg)?;
    Ok(PaoiCurve::new(
        "alternating-bound-printed",
        cfg.tau(),
        true,
        PaoiKind::AlternatingBoundPrinted(m),
    ))
}

/// PAoI law reported for `quality` of the configured scheme: exact where
/// available, the lower bound for the error-prone alternating scheme.
pub fn paoi_curve(cfg: &SystemConfig, quality: Quality) -> Result<PaoiCurve> {
    cfg.scheme().check_quality(quality)?;
    match cfg.scheme() {
        Scheme::Alternating if cfg.is_error_free() => alt_paoi(cfg),
        Scheme::Alternating => alt_paoi_bound(cfg),
        Scheme::QueueBased => Err(Error::SimulationOnly(Scheme::QueueBased)),
        _ => sync_paoi(cfg, quality),
    }
}
