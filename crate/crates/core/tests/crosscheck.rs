use mpath_core::age::alt_relevance_probability;
use mpath_core::latency::{alt_latency, path_sigmas};
use mpath_core::queue::dm1_latency_cdf;
use mpath_core::sim::{self, extract_latencies, extract_paoi, path_delays, PathOutcome};
use mpath_core::stats::{binomial_sd, ks_distance};
use mpath_core::{DistributionCurve, EmpiricalDistribution, Quality, Scheme, SystemConfig};

const FRAMES: usize = 201_000;

fn cfg(scheme: Scheme, tau: f64, mu: [f64; 2], eps: [f64; 2]) -> SystemConfig {
    SystemConfig::from_rates(scheme, tau, mu, eps).unwrap()
}

#[test]
fn per_path_sojourn_is_dm1() {
    let c = cfg(Scheme::Split, 1.2, [1.0, 1.5], [0.1, 0.3]);
    let trace = sim::run(&c, FRAMES, 11).unwrap();
    let sig = path_sigmas(&c).unwrap();
    for j in 0..2 {
        let emp = EmpiricalDistribution::new(path_delays(&trace, j)).unwrap();
        let ks = ks_distance(&emp, &|t| dm1_latency_cdf(c.effective_rate(j), &sig[j], t));
        assert!(ks < 0.01, "path {j}: KS {ks}");
    }
}

#[test]
fn both_copies_lost_at_eps_squared() {
    let c = cfg(Scheme::Replicated, 2.0, [1.0, 1.0], [0.2, 0.2]);
    let trace = sim::run(&c, FRAMES, 5).unwrap();
    let n = trace.records.len();
    let lost = trace
        .records
        .iter()
        .filter(|r| r.paths.iter().all(|p| *p == PathOutcome::Erased))
        .count() as f64
        / n as f64;
    assert!((lost - 0.04).abs() < 4.0 * binomial_sd(0.04, n), "lost {lost}");
}

#[test]
fn informative_fraction_matches_relevance() {
    let c = cfg(Scheme::Alternating, 1.0, [1.0, 1.5], [0.0, 0.0]);
    let trace = sim::run(&c, FRAMES, 3).unwrap();
    let (r1, r2) = alt_relevance_probability(&c).unwrap();
    let delivered = extract_latencies(&trace, Quality::Whole).unwrap().len();
    let informative = extract_paoi(&trace, Quality::Whole).unwrap().len() + 1;
    let frac = informative as f64 / delivered as f64;
    let want = (r1 + r2) / 2.0;
    assert!((frac - want).abs() < 4.0 * binomial_sd(want, delivered), "{frac} vs {want}");
}

#[test]
fn queue_based_tail_no_worse_than_alternating() {
    let c = cfg(Scheme::QueueBased, 2.0, [1.0, 1.5], [0.0, 0.0]);
    let qb = EmpiricalDistribution::new(extract_latencies(&sim::run(&c, FRAMES, 9).unwrap(), Quality::Whole).unwrap())
        .unwrap();
    let alt: DistributionCurve = alt_latency(&c.with_scheme(Scheme::Alternating)).unwrap();
    assert!(qb.percentile(0.99) <= alt.percentile(0.99) * 1.02);
}
