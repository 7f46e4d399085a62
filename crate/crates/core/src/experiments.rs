//! Scenarios, parameter sweeps, tau optimization and CSV output.
//!
//! Every result is a long-format [`Row`]. A scenario evaluates one system
//! configuration; a sweep varies one parameter over a grid and may pick,
//! at each grid point, the frame period that minimizes a 99th percentile.

use std::cmp::Ordering;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::age::{paoi_curve, PaoiCurve};
use crate::error::{Error, Result};
use crate::latency::{delivery_probability, latency_curve, DistributionCurve};
use crate::model::{assert_stable, Quality, Scheme, SystemConfig};
use crate::sim::{self, FrameTrace, DEFAULT_WARMUP};
use crate::stats::{ks_distance, EmpiricalDistribution};

pub mod presets;

pub const DEFAULT_FRAMES: usize = 1_048_576;
pub const DEFAULT_CURVE_POINTS: usize = 50;
/// Percentile reported by the `p99_*` metrics.
pub const TAIL_LEVEL: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    LatencyCdf,
    PaoiCdf,
    P99Latency,
    P99Paoi,
    DeliveryProb,
    /// Output only: the frame period chosen by an optimized sweep.
    OptimalTau,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::LatencyCdf => "latency_cdf",
            Metric::PaoiCdf => "paoi_cdf",
            Metric::P99Latency => "p99_latency",
            Metric::P99Paoi => "p99_paoi",
            Metric::DeliveryProb => "delivery_prob",
            Metric::OptimalTau => "optimal_tau",
        }
    }

    fn is_curve(self) -> bool {
        matches!(self, Metric::LatencyCdf | Metric::PaoiCdf)
    }
}

/// Where a value comes from. `Ks`, `RelGap` and `AbsGap` compare the
/// analytic and simulated values of the same metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Analytic,
    Simulated,
    /// KS distance; for lower-bound curves the largest amount by which the
    /// empirical cdf exceeds the bound (one-sided).
    Ks,
    RelGap,
    AbsGap,
}

impl Source {
    pub fn label(self) -> &'static str {
        match self {
            Source::Analytic => "analytic",
            Source::Simulated => "simulated",
            Source::Ks => "ks",
            Source::RelGap => "rel_gap",
            Source::AbsGap => "abs_gap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flag {
    None,
    Unstable,
    LowerBound,
}

impl Flag {
    pub fn label(self) -> &'static str {
        match self {
            Flag::None => "",
            Flag::Unstable => "unstable",
            Flag::LowerBound => "lower_bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub scenario: String,
    pub scheme: Scheme,
    pub quality: Quality,
    pub metric: Metric,
    /// `t` or `delta` for curve points, the swept parameter in sweeps,
    /// `none` for scalars.
    pub axis: &'static str,
    pub axis_value: Option<f64>,
    pub source: Source,
    pub value: f64,
    pub flag: Flag,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub rows: Vec<Row>,
    pub notices: Vec<String>,
}

impl Table {
    fn extend(&mut self, other: Table) {
        self.rows.extend(other.rows);
        self.notices.extend(other.notices);
    }

    /// Rows for one scheme, quality, metric and source, in row order.
    pub fn select(&self, scheme: &str, quality: Quality, metric: Metric, source: Source) -> Vec<&Row> {
        self.rows
            .iter()
            .filter(|r| r.scheme.label() == scheme && r.quality == quality && r.metric == metric && r.source == source)
            .collect()
    }
}

fn default_frames() -> usize {
    DEFAULT_FRAMES
}

fn default_curve_points() -> usize {
    DEFAULT_CURVE_POINTS
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub cfg: SystemConfig,
    #[serde(default = "default_frames")]
    pub n_frames: usize,
    #[serde(default)]
    pub seed: u64,
    pub metrics: Vec<Metric>,
    /// Empty means every quality of the scheme.
    #[serde(default)]
    pub qualities: Vec<Quality>,
    /// Points per reported cdf curve.
    #[serde(default = "default_curve_points")]
    pub grid_points: usize,
    #[serde(default = "yes")]
    pub analytic: bool,
    #[serde(default = "yes")]
    pub simulated: bool,
}

impl Scenario {
    pub fn new(name: impl Into<String>, cfg: SystemConfig, metrics: Vec<Metric>) -> Self {
        Scenario {
            name: name.into(),
            cfg,
            n_frames: DEFAULT_FRAMES,
            seed: 0,
            metrics,
            qualities: Vec::new(),
            grid_points: DEFAULT_CURVE_POINTS,
            analytic: true,
            simulated: true,
        }
    }

    fn qualities_for(&self, scheme: Scheme) -> Vec<Quality> {
        if self.qualities.is_empty() {
            scheme.qualities().to_vec()
        } else {
            self.qualities
                .iter()
                .copied()
                .filter(|q| scheme.check_quality(*q).is_ok())
                .collect()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.metrics.is_empty() {
            return Err(Error::InvalidParameter {
                name: "metrics",
                value: 0.0,
                reason: "at least one metric is required",
            });
        }
        if self.metrics.contains(&Metric::OptimalTau) {
            return Err(Error::InvalidParameter {
                name: "metrics",
                value: f64::NAN,
                reason: "optimal_tau is an output of optimized sweeps, not a requestable metric",
            });
        }
        for q in &self.qualities {
            self.cfg.scheme().check_quality(*q)?;
        }
        if self.simulated && self.n_frames < 2 * DEFAULT_WARMUP {
            return Err(Error::InvalidParameter {
                name: "n_frames",
                value: self.n_frames as f64,
                reason: "simulation needs at least 2000 frames",
            });
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidParameter {
                name: "grid_points",
                value: self.grid_points as f64,
                reason: "a curve needs at least two points",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Tau,
    Eta,
    Epsilon,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::Tau => "tau",
            Axis::Eta => "eta",
            Axis::Epsilon => "epsilon",
        }
    }

    /// Applies `value` to `cfg`. `eta` only changes coded schemes;
    /// `epsilon` sets both paths.
    pub fn apply(self, cfg: &SystemConfig, value: f64) -> Result<SystemConfig> {
        match self {
            Axis::Tau => cfg.with_tau(value),
            Axis::Epsilon => cfg.with_epsilon([value, value]),
            Axis::Eta => match cfg.scheme() {
                Scheme::Coded { .. } => Ok(cfg.with_scheme(Scheme::coded(value)?)),
                _ => {
                    Scheme::coded(value)?;
                    Ok(*cfg)
                }
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    MinimizeP99Paoi,
    MinimizeP99Latency,
}

impl Objective {
    pub fn metric(self) -> Metric {
        match self {
            Objective::MinimizeP99Paoi => Metric::P99Paoi,
            Objective::MinimizeP99Latency => Metric::P99Latency,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axis: Axis,
    pub grid: Vec<f64>,
    /// Schemes evaluated at every grid point; empty means the base scheme.
    #[serde(default)]
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub optimize: Option<Objective>,
}

impl SweepSpec {
    fn schemes(&self) -> Vec<Scheme> {
        if self.schemes.is_empty() {
            vec![self.base.cfg.scheme()]
        } else {
            self.schemes.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter {
                name: "grid",
                value: 0.0,
                reason: "sweep grid is empty",
            });
        }
        if self.base.metrics.iter().any(|m| m.is_curve()) {
            return Err(Error::InvalidParameter {
                name: "metrics",
                value: f64::NAN,
                reason: "sweeps report scalar metrics only (p99_latency, p99_paoi, delivery_prob)",
            });
        }
        if self.optimize.is_some() && self.axis == Axis::Tau {
            return Err(Error::InvalidParameter {
                name: "optimize",
                value: f64::NAN,
                reason: "cannot optimize tau while sweeping it",
            });
        }
        for s in self.schemes() {
            for &v in &self.grid {
                self.axis.apply(&self.base.cfg.with_scheme(s), v)?;
            }
        }
        Ok(())
    }
}

/// Analytic law of one metric.
enum Analytic {
    Latency(DistributionCurve),
    Age(PaoiCurve),
}

impl Analytic {
    fn cdf(&self, x: f64) -> f64 {
        match self {
            Analytic::Latency(c) => c.cdf(x),
            Analytic::Age(c) => c.cdf(x),
        }
    }

    fn percentile(&self, p: f64) -> f64 {
        match self {
            Analytic::Latency(c) => c.percentile(p),
            Analytic::Age(c) => c.percentile(p),
        }
    }

    fn is_lower_bound(&self) -> bool {
        matches!(self, Analytic::Age(c) if c.is_lower_bound())
    }

    fn ks(&self, emp: &EmpiricalDistribution) -> f64 {
        let f = |x: f64| self.cdf(x);
        if self.is_lower_bound() {
            emp.max_excess_over(&f).max(0.0)
        } else {
            ks_distance(emp, &f)
        }
    }
}

fn analytic_law(cfg: &SystemConfig, quality: Quality, metric: Metric) -> Result<Analytic> {
    match metric {
        Metric::LatencyCdf | Metric::P99Latency => latency_curve(cfg, quality).map(Analytic::Latency),
        _ => paoi_curve(cfg, quality).map(Analytic::Age),
    }
}

fn empirical(trace: &FrameTrace, quality: Quality, metric: Metric) -> Result<EmpiricalDistribution> {
    let samples = match metric {
        Metric::LatencyCdf | Metric::P99Latency => sim::extract_latencies(trace, quality)?,
        _ => sim::extract_paoi(trace, quality)?,
    };
    EmpiricalDistribution::new(samples).map_err(|_| Error::NoDelivery)
}

struct RowSink<'a> {
    scenario: &'a str,
    scheme: Scheme,
    rows: Vec<Row>,
}

impl RowSink<'_> {
    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, quality: Quality, metric: Metric, axis: &'static str, x: Option<f64>, source: Source, value: f64, flag: Flag) {
        self.rows.push(Row {
            scenario: self.scenario.to_string(),
            scheme: self.scheme,
            quality,
            metric,
            axis,
            axis_value: x,
            source,
            value,
            flag,
        });
    }
}

/// Evaluates every requested metric and quality of one configuration.
///
/// QueueBased and unstable configurations produce no analytic curves;
/// unstable points are reported as infinite and flagged.
pub fn run_scenario(scn: &Scenario) -> Result<Table> {
    scn.validate()?;
    let cfg = &scn.cfg;
    let scheme = cfg.scheme();
    let stable = assert_stable(cfg);
    let mut notices = Vec::new();
    let analytic = scn.analytic && scheme != Scheme::QueueBased;
    if scn.analytic && !analytic {
        notices.push(format!("{}: {scheme} has no analytic model; simulation results only", scn.name));
    }
    if let Err(report) = &stable {
        notices.push(format!("{}: {scheme} at tau={}: {report}", scn.name, cfg.tau()));
    }
    let wants_delivery = scn.metrics.contains(&Metric::DeliveryProb);
    let trace = if scn.simulated && (stable.is_ok() || wants_delivery) {
        Some(sim::run(cfg, scn.n_frames, scn.seed)?)
    } else {
        None
    };

    let mut sink = RowSink {
        scenario: &scn.name,
        scheme,
        rows: Vec::new(),
    };
    for quality in scn.qualities_for(scheme) {
        for &metric in &scn.metrics {
            if metric == Metric::DeliveryProb {
                let a = analytic
                    .then(|| delivery_probability(scheme, quality, cfg.epsilons()[0], cfg.epsilons()[1]))
                    .transpose()?;
                let s = trace.as_ref().map(|t| sim::delivered_fraction(t, quality)).transpose()?;
                if let Some(a) = a {
                    sink.push(quality, metric, "none", None, Source::Analytic, a, Flag::None);
                }
                if let Some(s) = s {
                    sink.push(quality, metric, "none", None, Source::Simulated, s, Flag::None);
                }
                if let (Some(a), Some(s)) = (a, s) {
                    sink.push(quality, metric, "none", None, Source::AbsGap, (s - a).abs(), Flag::None);
                }
                continue;
            }
            if stable.is_err() {
                if analytic {
                    sink.push(quality, metric, "none", None, Source::Analytic, f64::INFINITY, Flag::Unstable);
                }
                if scn.simulated {
                    sink.push(quality, metric, "none", None, Source::Simulated, f64::INFINITY, Flag::Unstable);
                }
                continue;
            }
            let law = if analytic { Some(analytic_law(cfg, quality, metric)?) } else { None };
            let emp = trace.as_ref().map(|t| empirical(t, quality, metric)).transpose()?;
            let flag = if law.as_ref().is_some_and(Analytic::is_lower_bound) {
                Flag::LowerBound
            } else {
                Flag::None
            };
            if metric.is_curve() {
                let axis = if metric == Metric::LatencyCdf { "t" } else { "delta" };
                let upper = match (&law, &emp) {
                    (Some(l), _) if l.percentile(0.999).is_finite() => l.percentile(0.999),
                    (_, Some(e)) => e.percentile(0.999),
                    _ => cfg.tau() * 10.0,
                };
                let n = scn.grid_points;
                for k in 0..n {
                    let x = upper * k as f64 / (n - 1) as f64;
                    if let Some(l) = &law {
                        sink.push(quality, metric, axis, Some(x), Source::Analytic, l.cdf(x), flag);
                    }
                    if let Some(e) = &emp {
                        sink.push(quality, metric, axis, Some(x), Source::Simulated, e.cdf(x), Flag::None);
                    }
                }
                if let (Some(l), Some(e)) = (&law, &emp) {
                    sink.push(quality, metric, "none", None, Source::Ks, l.ks(e), flag);
                }
            } else {
                let a = law.as_ref().map(|l| l.percentile(TAIL_LEVEL));
                let s = emp.as_ref().map(|e| e.percentile(TAIL_LEVEL));
                if let Some(a) = a {
                    sink.push(quality, metric, "none", None, Source::Analytic, a, flag);
                }
                if let Some(s) = s {
                    sink.push(quality, metric, "none", None, Source::Simulated, s, Flag::None);
                }
                if let (Some(a), Some(s)) = (a, s) {
                    sink.push(quality, metric, "none", None, Source::RelGap, (s - a) / a, flag);
                }
            }
        }
    }
    Ok(Table {
        rows: sink.rows,
        notices,
    })
}

/// Runs the sweep over every (grid value, scheme) pair in parallel.
/// Pairs that resolve to the same configuration (an `eta` sweep leaves
/// uncoded schemes unchanged) are evaluated once.
pub fn sweep(spec: &SweepSpec) -> Result<Table> {
    spec.validate()?;
    let mut cells = Vec::new();
    for &v in &spec.grid {
        for s in spec.schemes() {
            cells.push((v, spec.axis.apply(&spec.base.cfg.with_scheme(s), v)?));
        }
    }
    let mut unique: Vec<SystemConfig> = Vec::new();
    let slots: Vec<usize> = cells
        .iter()
        .map(|(_, c)| match unique.iter().position(|u| u == c) {
            Some(k) => k,
            None => {
                unique.push(*c);
                unique.len() - 1
            }
        })
        .collect();
    let tables = unique
        .par_iter()
        .map(|c| sweep_cell(spec, c))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Table::default();
    for ((value, _), k) in cells.iter().zip(slots) {
        let mut t = tables[k].clone();
        for r in &mut t.rows {
            r.axis = spec.axis.label();
            r.axis_value = Some(*value);
        }
        out.extend(t);
    }
    Ok(out)
}

fn sweep_cell(spec: &SweepSpec, cfg: &SystemConfig) -> Result<Table> {
    let scheme = cfg.scheme();
    let qualities = spec.base.qualities_for(scheme);
    let mut table = Table::default();
    match spec.optimize {
        None => {
            let scn = Scenario {
                cfg: *cfg,
                qualities,
                ..spec.base.clone()
            };
            table.extend(run_scenario(&scn)?);
        }
        Some(objective) => {
            for q in qualities {
                let opt = optimize_tau(cfg, q, objective, spec.base.n_frames, spec.base.seed)?;
                let scn = Scenario {
                    cfg: cfg.with_tau(opt.tau)?,
                    qualities: vec![q],
                    ..spec.base.clone()
                };
                let mut t = run_scenario(&scn)?;
                let source = if opt.simulated { Source::Simulated } else { Source::Analytic };
                t.rows.push(Row {
                    scenario: spec.base.name.clone(),
                    scheme,
                    quality: q,
                    metric: Metric::OptimalTau,
                    axis: "none",
                    axis_value: None,
                    source,
                    value: opt.tau,
                    flag: Flag::None,
                });
                table.extend(t);
            }
        }
    }
    Ok(table)
}

/// Result of a frame-period search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauOptimum {
    pub tau: f64,
    pub value: f64,
    /// True when the objective came from simulation (no analytic model).
    pub simulated: bool,
}

/// Frame period minimizing the objective percentile for `quality`.
///
/// The search covers `(tau_c, max(16, 40 tau_c)]` in log scale, where
/// `tau_c` is the stability boundary: a coarse scan picks the best bracket,
/// golden-section search refines it to 1e-3 relative. Without an analytic
/// model the simulated percentile is minimized with a fixed seed.
pub fn optimize_tau(cfg: &SystemConfig, quality: Quality, objective: Objective, n_frames: usize, seed: u64) -> Result<TauOptimum> {
    let metric = objective.metric();
    let simulated = cfg.scheme() == Scheme::QueueBased;
    let eval = |tau: f64| -> Result<f64> {
        let c = cfg.with_tau(tau)?;
        if assert_stable(&c).is_err() {
            return Ok(f64::INFINITY);
        }
        if simulated {
            let trace = sim::run(&c, n_frames, seed)?;
            Ok(empirical(&trace, quality, metric)?.percentile(TAIL_LEVEL))
        } else {
            Ok(analytic_law(&c, quality, metric)?.percentile(TAIL_LEVEL))
        }
    };
    let loads = cfg.loads();
    let critical = cfg.tau() * loads[0].max(loads[1]);
    let lo = critical * 1.01;
    let hi = (40.0 * critical).max(16.0);
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    const SCAN: usize = 25;
    let xs: Vec<f64> = (0..SCAN)
        .map(|k| ln_lo + (ln_hi - ln_lo) * k as f64 / (SCAN - 1) as f64)
        .collect();
    let ys = xs.iter().map(|&x| eval(x.exp())).collect::<Result<Vec<_>>>()?;
    let best = (0..SCAN)
        .min_by(|&a, &b| ys[a].partial_cmp(&ys[b]).unwrap_or(Ordering::Equal))
        .unwrap();
    let (mut a, mut b) = (xs[best.saturating_sub(1)], xs[(best + 1).min(SCAN - 1)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (eval(c.exp())?, eval(d.exp())?);
    while (b - a).exp_m1() > 1e-3 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval(d.exp())?;
        }
    }
    let (mut x, mut y) = if fc <= fd { (c, fc) } else { (d, fd) };
    if ys[best] < y {
        x = xs[best];
        y = ys[best];
    }
    Ok(TauOptimum {
        tau: x.exp(),
        value: y,
        simulated,
    })
}

/// `%.9g`-style formatting: nine significant digits, trailing zeros
/// removed, exponent form below `1e-4` and from `1e9` on.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (8 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const CSV_HEADER: [&str; 9] = [
    "scenario", "scheme", "quality", "metric", "axis", "axis_value", "source", "value", "flag",
];

fn row_order(a: &Row, b: &Row) -> Ordering {
    let axis = |r: &Row| r.axis_value.unwrap_or(f64::NEG_INFINITY);
    a.scenario
        .cmp(&b.scenario)
        .then(axis(a).total_cmp(&axis(b)))
        .then(a.scheme.label().cmp(b.scheme.label()))
        .then(a.quality.cmp(&b.quality))
        .then(a.metric.cmp(&b.metric))
        .then(a.source.cmp(&b.source))
}

/// Writes the rows sorted by scenario, axis value, scheme, quality, metric
/// and source. Ties keep their original order.
pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<()> {
    let mut rows: Vec<&Row> = table.rows.iter().collect();
    rows.sort_by(|a, b| row_order(a, b));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.scenario.as_str(),
            r.scheme.label(),
            r.quality.label(),
            r.metric.label(),
            r.axis,
            &r.axis_value.map(format_value).unwrap_or_default(),
            r.source.label(),
            &format_value(r.value),
            r.flag.label(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes the table to `path`; fails on an empty table.
pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::InvalidParameter {
            name: "table",
            value: 0.0,
            reason: "nothing to write",
        });
    }
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    let mut buf = std::io::BufWriter::new(file);
    write_csv(table, &mut buf)?;
    buf.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(scheme: Scheme, tau: f64, mu: [f64; 2], eps: [f64; 2]) -> SystemConfig {
        SystemConfig::from_rates(scheme, tau, mu, eps).unwrap()
    }

    #[test]
    fn value_formatting() {
        assert_eq!(format_value(0.0), "0");
        assert_eq!(format_value(1.0), "1");
        assert_eq!(format_value(0.5), "0.5");
        assert_eq!(format_value(4.605170185988091), "4.60517019");
        assert_eq!(format_value(123456789.4), "123456789");
        assert_eq!(format_value(1234567894.0), "1.23456789e+09");
        assert_eq!(format_value(0.0001), "0.0001");
        assert_eq!(format_value(0.00001234), "1.234e-05");
        assert_eq!(format_value(-2.5), "-2.5");
        assert_eq!(format_value(9.9999999996), "10");
        assert_eq!(format_value(f64::INFINITY), "inf");
    }

    #[test]
    fn scenario_rows() {
        let mut scn = Scenario::new(
            "t",
            cfg(Scheme::coded(0.75).unwrap(), 1.5, [1.0, 1.0], [0.2, 0.2]),
            vec![Metric::LatencyCdf, Metric::P99Latency, Metric::DeliveryProb],
        );
        scn.n_frames = 20_000;
        scn.grid_points = 5;
        let t = run_scenario(&scn).unwrap();
        let lq = t.select("coded", Quality::Lq, Metric::P99Latency, Source::Analytic)[0].value;
        let hq = t.select("coded", Quality::Hq, Metric::P99Latency, Source::Analytic)[0].value;
        assert!(lq < hq);
        assert_eq!(t.select("coded", Quality::Lq, Metric::LatencyCdf, Source::Simulated).len(), 5);
        let ks = t.select("coded", Quality::Hq, Metric::LatencyCdf, Source::Ks)[0].value;
        assert!(ks < 0.05);
        let p = t.select("coded", Quality::Hq, Metric::DeliveryProb, Source::Analytic)[0].value;
        assert!((p - 0.64).abs() < 1e-12);
    }

    #[test]
    fn queue_based_is_simulation_only() {
        let mut scn = Scenario::new("q", cfg(Scheme::QueueBased, 2.0, [1.0, 1.0], [0.0, 0.0]), vec![Metric::P99Latency]);
        scn.n_frames = 5000;
        let t = run_scenario(&scn).unwrap();
        assert_eq!(t.notices.len(), 1);
        assert!(t.rows.iter().all(|r| r.source == Source::Simulated));
    }

    #[test]
    fn unstable_points_are_flagged() {
        let mut base = Scenario::new("s", cfg(Scheme::coded(0.75).unwrap(), 0.75, [1.0, 1.0], [0.0, 0.0]), vec![Metric::P99Latency]);
        base.qualities = vec![Quality::Hq];
        base.simulated = false;
        let spec = SweepSpec {
            base,
            axis: Axis::Eta,
            grid: vec![0.6, 2.0 / 3.0, 0.7, 0.9],
            schemes: vec![],
            optimize: None,
        };
        let t = sweep(&spec).unwrap();
        let vals: Vec<(f64, f64, Flag)> = t.rows.iter().map(|r| (r.axis_value.unwrap(), r.value, r.flag)).collect();
        assert_eq!(vals.len(), 4);
        for (eta, v, flag) in vals {
            if eta <= 2.0 / 3.0 {
                assert!(v.is_infinite() && flag == Flag::Unstable);
            } else {
                assert!(v.is_finite() && flag == Flag::None);
            }
        }
    }

    #[test]
    fn sweep_validation() {
        let base = Scenario::new("s", cfg(Scheme::Split, 1.5, [1.0, 1.0], [0.0, 0.0]), vec![Metric::LatencyCdf]);
        let spec = SweepSpec {
            base,
            axis: Axis::Tau,
            grid: vec![1.0],
            schemes: vec![],
            optimize: None,
        };
        assert!(spec.validate().is_err());
        let mut ok = spec.clone();
        ok.base.metrics = vec![Metric::P99Latency];
        assert!(ok.validate().is_ok());
        ok.grid.clear();
        assert!(ok.validate().is_err());
        let mut eta = spec.clone();
        eta.base.metrics = vec![Metric::P99Latency];
        eta.axis = Axis::Eta;
        eta.grid = vec![0.4];
        assert!(eta.validate().is_err());
        eta.axis = Axis::Tau;
        eta.grid = vec![1.0];
        eta.optimize = Some(Objective::MinimizeP99Paoi);
        assert!(eta.validate().is_err());
    }

    #[test]
    fn optimum_is_interior() {
        let c = cfg(Scheme::Split, 1.0, [1.0, 1.0], [0.0, 0.0]);
        let opt = optimize_tau(&c, Quality::Whole, Objective::MinimizeP99Paoi, 0, 0).unwrap();
        let f = |tau: f64| paoi_curve(&c.with_tau(tau).unwrap(), Quality::Whole).unwrap().percentile(0.99);
        assert!((f(opt.tau) - opt.value).abs() < 1e-12);
        assert!(f(opt.tau * 1.05) > opt.value && f(opt.tau / 1.05) > opt.value);
    }

    #[test]
    fn csv_is_sorted_and_formatted() {
        let mut scn = Scenario::new("b", cfg(Scheme::Split, 1.5, [1.0, 1.0], [0.0, 0.0]), vec![Metric::P99Latency]);
        scn.simulated = false;
        let mut t = run_scenario(&scn).unwrap();
        let mut scn2 = scn.clone();
        scn2.name = "a".into();
        t.extend(run_scenario(&scn2).unwrap());
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "scenario,scheme,quality,metric,axis,axis_value,source,value,flag");
        assert!(lines[1].starts_with("a,split,whole,p99_latency,none,,analytic,"));
        assert!(lines[2].starts_with("b,"));
        assert!(lines[1].ends_with(','));
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("no/such/dir/out.csv");
        match emit_csv(&t, &missing) {
            Err(Error::Io { path, .. }) => assert_eq!(path, missing),
            other => panic!("expected an I/O error, got {other:?}"),
        }
        assert!(emit_csv(&Table::default(), &dir.path().join("x.csv")).is_err());
    }

    #[test]
    fn scenario_json_round_trip() {
        let text = r#"{
            "name": "demo",
            "cfg": {"scheme": {"kind": "coded", "eta": 0.75}, "tau": 1.5,
                    "paths": [{"mu": 1.0, "epsilon": 0.2}, {"mu": 1.5}]},
            "metrics": ["p99_latency", "delivery_prob"],
            "qualities": ["lq"]
        }"#;
        let scn: Scenario = serde_json::from_str(text).unwrap();
        assert_eq!(scn.n_frames, DEFAULT_FRAMES);
        assert_eq!(scn.cfg.epsilons(), [0.2, 0.0]);
        let back: Scenario = serde_json::from_str(&serde_json::to_string(&scn).unwrap()).unwrap();
        assert_eq!(back, scn);
        assert!(serde_json::from_str::<Scenario>(&text.replace("\"lq\"", "\"lq\"], \"bogus\": [1")).is_err());
    }
}
