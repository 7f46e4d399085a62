//! Named experiment families.
//!
//! Grids follow the published figure families: frame periods 0.75, 1.5, 2
//! and 4, erasure probability 0.2, rate pairs (1, 1) and (1, 1.5), coding
//! rate 0.75. Sweep grids are log-spaced in tau over [0.6, 8], linear in
//! eta over [0.5, 1] and in epsilon over [0, 0.4].

use rayon::prelude::*;

use super::{run_scenario, sweep, Axis, Metric, Objective, Scenario, SweepSpec, Table, DEFAULT_FRAMES};
use crate::error::{Error, Result};
use crate::model::{Scheme, SystemConfig};
use crate::stats::log_grid;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetOptions {
    pub n_frames: usize,
    pub seed: u64,
    /// Overrides the preset's curve resolution or sweep grid size.
    pub grid_points: Option<usize>,
}

impl Default for PresetOptions {
    fn default() -> Self {
        PresetOptions {
            n_frames: DEFAULT_FRAMES,
            seed: DEFAULT_SEED,
            grid_points: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Scenario(Scenario),
    Sweep(SweepSpec),
}

impl Job {
    pub fn run(&self) -> Result<Table> {
        match self {
            Job::Scenario(s) => run_scenario(s),
            Job::Sweep(s) => sweep(s),
        }
    }
}

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn(&PresetOptions) -> Vec<Job>,
}

impl Preset {
    pub fn jobs(&self, opts: &PresetOptions) -> Vec<Job> {
        (self.build)(opts)
    }

    pub fn run(&self, opts: &PresetOptions) -> Result<Table> {
        run_jobs(&self.jobs(opts))
    }
}

/// Runs jobs in parallel; rows come back in job order.
pub fn run_jobs(jobs: &[Job]) -> Result<Table> {
    let tables = jobs.par_iter().map(Job::run).collect::<Result<Vec<_>>>()?;
    let mut out = Table::default();
    for t in tables {
        out.rows.extend(t.rows);
        out.notices.extend(t.notices);
    }
    Ok(out)
}

static PRESETS: [Preset; 10] = [
    Preset {
        name: "lat-cdf-balanced",
        description: "latency cdf, all schemes, mu=(1,1), error-free, tau in {0.75,1.5,2,4}",
        build: lat_cdf_balanced,
    },
    Preset {
        name: "lat-eta",
        description: "p99 latency vs coding rate, mu=(1,1), error-free, tau in {0.75,1.5,2,4}",
        build: lat_eta,
    },
    Preset {
        name: "lat-cdf-unbalanced",
        description: "latency cdf, all schemes, mu=(1,1.5), error-free",
        build: lat_cdf_unbalanced,
    },
    Preset {
        name: "err-prob",
        description: "frame delivery probability vs erasure probability",
        build: err_prob,
    },
    Preset {
        name: "lat-cdf-errors",
        description: "latency cdf of delivered frames, mu=(1,1), epsilon=0.2",
        build: lat_cdf_errors,
    },
    Preset {
        name: "lat99-vs-tau",
        description: "p99 latency vs frame period in four path scenarios",
        build: lat99_vs_tau,
    },
    Preset {
        name: "paoi-cdf-balanced",
        description: "peak age cdf, mu=(1,1), error-free",
        build: paoi_cdf_balanced,
    },
    Preset {
        name: "paoi-cdf-errors",
        description: "peak age cdf, mu=(1,1), epsilon=0.2 (alternating: lower bound)",
        build: paoi_cdf_errors,
    },
    Preset {
        name: "paoi99-vs-tau",
        description: "p99 peak age vs frame period in four path scenarios",
        build: paoi99_vs_tau,
    },
    Preset {
        name: "paoi99-vs-eta-optimized",
        description: "p99 peak age vs coding rate at the best frame period",
        build: paoi99_vs_eta,
    },
];

pub fn presets() -> &'static [Preset] {
    &PRESETS
}

pub fn preset(name: &str) -> Result<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

const CDF_TAUS: [f64; 4] = [0.75, 1.5, 2.0, 4.0];
const CODED_ETA: f64 = 0.75;

fn coded() -> Scheme {
    Scheme::coded(CODED_ETA).expect("valid coding rate")
}

fn analytic_schemes() -> Vec<Scheme> {
    vec![Scheme::Alternating, Scheme::Replicated, Scheme::Split, coded()]
}

fn all_schemes() -> Vec<Scheme> {
    let mut s = analytic_schemes();
    s.push(Scheme::QueueBased);
    s
}

fn config(scheme: Scheme, tau: f64, mu: [f64; 2], eps: [f64; 2]) -> SystemConfig {
    SystemConfig::from_rates(scheme, tau, mu, eps).expect("preset parameters are valid")
}

fn scenario(name: String, cfg: SystemConfig, metrics: Vec<Metric>, opts: &PresetOptions) -> Scenario {
    let mut s = Scenario::new(name, cfg, metrics);
    s.n_frames = opts.n_frames;
    s.seed = opts.seed;
    if let Some(n) = opts.grid_points {
        s.grid_points = n;
    }
    s
}

fn cdf_family(preset: &str, metric: Metric, mu: [f64; 2], eps: [f64; 2], opts: &PresetOptions) -> Vec<Job> {
    CDF_TAUS
        .iter()
        .flat_map(|&tau| {
            all_schemes().into_iter().map(move |s| {
                Job::Scenario(scenario(format!("{preset}/tau={tau}"), config(s, tau, mu, eps), vec![metric], opts))
            })
        })
        .collect()
}

/// Path scenarios of the percentile sweeps.
const VARIANTS: [(&str, [f64; 2], [f64; 2]); 4] = [
    ("balanced", [1.0, 1.0], [0.0, 0.0]),
    ("errors", [1.0, 1.0], [0.2, 0.2]),
    ("unbalanced", [1.0, 1.5], [0.0, 0.0]),
    ("unbalanced-errors", [1.0, 1.0], [0.1, 0.2]),
];

fn tau_family(preset: &str, metric: Metric, opts: &PresetOptions) -> Vec<Job> {
    let grid = log_grid(0.6, 8.0, opts.grid_points.unwrap_or(16).max(2));
    VARIANTS
        .iter()
        .map(|(label, mu, eps)| {
            Job::Sweep(SweepSpec {
                base: scenario(format!("{preset}/{label}"), config(Scheme::Split, 1.0, *mu, *eps), vec![metric], opts),
                axis: Axis::Tau,
                grid: grid.clone(),
                schemes: all_schemes(),
                optimize: None,
            })
        })
        .collect()
}

fn linear(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn lat_cdf_balanced(o: &PresetOptions) -> Vec<Job> {
    cdf_family("lat-cdf-balanced", Metric::LatencyCdf, [1.0, 1.0], [0.0, 0.0], o)
}

fn lat_cdf_unbalanced(o: &PresetOptions) -> Vec<Job> {
    cdf_family("lat-cdf-unbalanced", Metric::LatencyCdf, [1.0, 1.5], [0.0, 0.0], o)
}

fn lat_cdf_errors(o: &PresetOptions) -> Vec<Job> {
    cdf_family("lat-cdf-errors", Metric::LatencyCdf, [1.0, 1.0], [0.2, 0.2], o)
}

fn paoi_cdf_balanced(o: &PresetOptions) -> Vec<Job> {
    cdf_family("paoi-cdf-balanced", Metric::PaoiCdf, [1.0, 1.0], [0.0, 0.0], o)
}

fn paoi_cdf_errors(o: &PresetOptions) -> Vec<Job> {
    cdf_family("paoi-cdf-errors", Metric::PaoiCdf, [1.0, 1.0], [0.2, 0.2], o)
}

fn lat99_vs_tau(o: &PresetOptions) -> Vec<Job> {
    tau_family("lat99-vs-tau", Metric::P99Latency, o)
}

fn paoi99_vs_tau(o: &PresetOptions) -> Vec<Job> {
    tau_family("paoi99-vs-tau", Metric::P99Paoi, o)
}

fn lat_eta(o: &PresetOptions) -> Vec<Job> {
    let grid = linear(0.5, 1.0, o.grid_points.unwrap_or(21));
    CDF_TAUS
        .iter()
        .map(|&tau| {
            Job::Sweep(SweepSpec {
                base: scenario(
                    format!("lat-eta/tau={tau}"),
                    config(coded(), tau, [1.0, 1.0], [0.0, 0.0]),
                    vec![Metric::P99Latency],
                    o,
                ),
                axis: Axis::Eta,
                grid: grid.clone(),
                schemes: analytic_schemes(),
                optimize: None,
            })
        })
        .collect()
}

fn err_prob(o: &PresetOptions) -> Vec<Job> {
    vec![Job::Sweep(SweepSpec {
        base: scenario(
            "err-prob".into(),
            config(Scheme::Split, 2.0, [1.0, 1.0], [0.0, 0.0]),
            vec![Metric::DeliveryProb],
            o,
        ),
        axis: Axis::Epsilon,
        grid: linear(0.0, 0.4, o.grid_points.unwrap_or(9)),
        schemes: analytic_schemes(),
        optimize: None,
    })]
}

fn paoi99_vs_eta(o: &PresetOptions) -> Vec<Job> {
    let grid = linear(0.5, 1.0, o.grid_points.unwrap_or(11));
    VARIANTS
        .iter()
        .map(|(label, mu, eps)| {
            Job::Sweep(SweepSpec {
                base: scenario(
                    format!("paoi99-vs-eta-optimized/{label}"),
                    config(coded(), 1.0, *mu, *eps),
                    vec![Metric::P99Paoi],
                    o,
                ),
                axis: Axis::Eta,
                grid: grid.clone(),
                schemes: analytic_schemes(),
                optimize: Some(Objective::MinimizeP99Paoi),
            })
        })
        .collect()
}
