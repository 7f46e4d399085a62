//! System parameterization: paths, schedulers, and the load accounting that
//! every analytic and simulated quantity is derived from.
//!
//! A packet of normalized size `L` on path `j` is served at rate `mu_j / L`.
//! The queue-based scheduler is accounted as one whole frame (`L = 1`) per
//! `tau`, balanced between the two paths, i.e. `lambda_j = 1 / (2 tau)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack below 1 at which a load is already treated as unstable.
///
/// Keeps `eta = 2/3` at `tau = 0.75` (load exactly 1 in real arithmetic)
/// on the unstable side regardless of rounding.
pub const LOAD_EPS: f64 = 1e-12;

/// One link: service rate for a unit-size packet and erasure probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPath", into = "RawPath")]
pub struct PathParams {
    mu: f64,
    epsilon: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPath {
    mu: f64,
    #[serde(default)]
    epsilon: f64,
}

impl TryFrom<RawPath> for PathParams {
    type Error = Error;
    fn try_from(raw: RawPath) -> Result<Self> {
        PathParams::new(raw.mu, raw.epsilon)
    }
}

impl From<PathParams> for RawPath {
    fn from(p: PathParams) -> Self {
        RawPath {
            mu: p.mu,
            epsilon: p.epsilon,
        }
    }
}

impl PathParams {
    pub fn new(mu: f64, epsilon: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: mu,
                reason: "service rate must be positive and finite",
            });
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
                reason: "erasure probability must lie in [0, 1)",
            });
        }
        Ok(PathParams { mu, epsilon })
    }

    /// Error-free path with service rate `mu`.
    pub fn reliable(mu: f64) -> Result<Self> {
        Self::new(mu, 0.0)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// MDC coding rate, `0.5 <= eta <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CodingRate(f64);

impl CodingRate {
    pub const REPLICATION: CodingRate = CodingRate(0.5);
    pub const SPLIT: CodingRate = CodingRate(1.0);

    pub fn new(eta: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: eta,
                reason: "coding rate must lie in [0.5, 1]",
            });
        }
        Ok(CodingRate(eta))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for CodingRate {
    type Error = Error;
    fn try_from(eta: f64) -> Result<Self> {
        CodingRate::new(eta)
    }
}

impl From<CodingRate> for f64 {
    fn from(c: CodingRate) -> f64 {
        c.0
    }
}

/// Frame-to-path scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    /// Round-robin: even frame indices on path 1, odd on path 2.
    Alternating,
    /// Whole frame duplicated on both paths.
    Replicated,
    /// Frame halved, one half per path.
    Split,
    /// Two independently decodable descriptors of size `1/(2 eta)`.
    Coded { eta: CodingRate },
    /// Whole frame on the path with fewer packets in system (simulation only).
    QueueBased,
}

impl Scheme {
    pub fn coded(eta: f64) -> Result<Self> {
        Ok(Scheme::Coded {
            eta: CodingRate::new(eta)?,
        })
    }

    /// Short label used in tables and file output.
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Alternating => "alternating",
            Scheme::Replicated => "replicated",
            Scheme::Split => "split",
            Scheme::Coded { .. } => "coded",
            Scheme::QueueBased => "queue_based",
        }
    }

    /// Schemes that send one packet on each path for every frame.
    pub fn is_synchronized(&self) -> bool {
        matches!(
            self,
            Scheme::Replicated | Scheme::Split | Scheme::Coded { .. }
        )
    }

    /// Coding rate seen by the synchronized analysis (`None` otherwise).
    pub fn eta(&self) -> Option<f64> {
        match self {
            Scheme::Replicated => Some(0.5),
            Scheme::Split => Some(1.0),
            Scheme::Coded { eta } => Some(eta.get()),
            _ => None,
        }
    }

    /// Qualities that are meaningful for this scheme.
    pub fn qualities(&self) -> &'static [Quality] {
        match self {
            Scheme::Coded { .. } => &[Quality::Lq, Quality::Hq],
            _ => &[Quality::Whole],
        }
    }

    pub fn check_quality(&self, quality: Quality) -> Result<()> {
        if self.qualities().contains(&quality) {
            Ok(())
        } else {
            Err(Error::IncompatibleQuality {
                scheme: *self,
                quality,
            })
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Coded { eta } => write!(f, "coded(eta={})", eta.get()),
            other => f.write_str(other.label()),
        }
    }
}

/// Which version of a frame a metric refers to.
///
/// `Whole` is the only quality of the uncoded schemes: the single packet for
/// alternating/queue-based, the first copy for replicated and both halves
/// for split. Coded frames report `Lq` (first descriptor) and `Hq` (both).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quality {
    Whole,
    Lq,
    Hq,
}

impl Quality {
    pub fn label(&self) -> &'static str {
        match self {
            Quality::Whole => "whole",
            Quality::Lq => "lq",
            Quality::Hq => "hq",
        }
    }
}

impl fmt::Display for Quality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Quality {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "whole" => Ok(Quality::Whole),
            "lq" => Ok(Quality::Lq),
            "hq" => Ok(Quality::Hq),
            other => Err(format!("unknown quality `{other}` (expected whole, lq or hq)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct SystemConfig {
    scheme: Scheme,
    tau: f64,
    paths: [PathParams; 2],
}

#[derive(Serialize, Deserialize)]
struct RawConfig {
    scheme: Scheme,
    tau: f64,
    paths: [PathParams; 2],
}

impl TryFrom<RawConfig> for SystemConfig {
    type Error = Error;
    fn try_from(raw: RawConfig) -> Result<Self> {
        SystemConfig::new(raw.scheme, raw.tau, raw.paths)
    }
}

impl From<SystemConfig> for RawConfig {
    fn from(c: SystemConfig) -> Self {
        RawConfig {
            scheme: c.scheme,
            tau: c.tau,
            paths: c.paths,
        }
    }
}

impl SystemConfig {
    pub fn new(scheme: Scheme, tau: f64, paths: [PathParams; 2]) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: tau,
                reason: "inter-frame period must be positive and finite",
            });
        }
        Ok(SystemConfig { scheme, tau, paths })
    }

    /// Convenience constructor from raw rates and erasure probabilities.
    pub fn from_rates(scheme: Scheme, tau: f64, mu: [f64; 2], epsilon: [f64; 2]) -> Result<Self> {
        Self::new(
            scheme,
            tau,
            [
                PathParams::new(mu[0], epsilon[0])?,
                PathParams::new(mu[1], epsilon[1])?,
            ],
        )
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn paths(&self) -> &[PathParams; 2] {
        &self.paths
    }

    pub fn path(&self, j: usize) -> &PathParams {
        &self.paths[j]
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        SystemConfig { scheme, ..*self }
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.scheme, tau, self.paths)
    }

    pub fn with_epsilon(&self, epsilon: [f64; 2]) -> Result<Self> {
        Self::from_rates(
            self.scheme,
            self.tau,
            [self.paths[0].mu, self.paths[1].mu],
            epsilon,
        )
    }

    pub fn epsilons(&self) -> [f64; 2] {
        [self.paths[0].epsilon, self.paths[1].epsilon]
    }

    pub fn mus(&self) -> [f64; 2] {
        [self.paths[0].mu, self.paths[1].mu]
    }

    pub fn is_error_free(&self) -> bool {
        self.paths.iter().all(|p| p.epsilon == 0.0)
    }

    /// Service rate of one packet on path `j` (index 0 or 1): `mu_j / L`.
    pub fn effective_rate(&self, j: usize) -> f64 {
        self.paths[j].mu / packet_size(self.scheme)
    }

    /// Mean time between packet arrivals on one path.
    pub fn interarrival(&self) -> f64 {
        1.0 / arrival_rate(self.scheme, self.tau)
    }

    /// Loads of both paths.
    pub fn loads(&self) -> [f64; 2] {
        [path_load(self, 0), path_load(self, 1)]
    }

    /// Exponent coefficient of the Erlang fixed point on path `j`,
    /// `a = effective rate * interarrival = 1 / rho_j`.
    pub fn sigma_coefficient(&self, j: usize) -> f64 {
        self.effective_rate(j) * self.interarrival()
    }
}

/// Normalized packet size `L` (a whole frame is 1).
pub fn packet_size(scheme: Scheme) -> f64 {
    match scheme {
        Scheme::Alternating | Scheme::Replicated | Scheme::QueueBased => 1.0,
        Scheme::Split => 0.5,
        Scheme::Coded { eta } => 1.0 / (2.0 * eta.get()),
    }
}

/// Per-path packet arrival rate.
pub fn arrival_rate(scheme: Scheme, tau: f64) -> f64 {
    match scheme {
        Scheme::Alternating | Scheme::QueueBased => 1.0 / (2.0 * tau),
        _ => 1.0 / tau,
    }
}

/// Load `L * lambda_j / mu_j` on path `j` (index 0 or 1).
pub fn path_load(cfg: &SystemConfig, j: usize) -> f64 {
    packet_size(cfg.scheme) * arrival_rate(cfg.scheme, cfg.tau) / cfg.paths[j].mu
}

/// Paths whose load is not strictly below one.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("unstable configuration: {}", describe(.violations))]
pub struct InstabilityReport {
    /// `(path number 1 or 2, load)` for each violating path.
    pub violations: Vec<(usize, f64)>,
}

fn describe(v: &[(usize, f64)]) -> String {
    v.iter()
        .map(|(j, rho)| format!("path {j} has load {rho:.6} >= 1"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn assert_stable(cfg: &SystemConfig) -> Result<(), InstabilityReport> {
    let violations: Vec<(usize, f64)> = cfg
        .loads()
        .iter()
        .enumerate()
        .filter(|(_, &rho)| rho >= 1.0 - LOAD_EPS)
        .map(|(j, &rho)| (j + 1, rho))
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(InstabilityReport { violations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(scheme: Scheme, tau: f64, mu: [f64; 2]) -> SystemConfig {
        SystemConfig::from_rates(scheme, tau, mu, [0.0, 0.0]).unwrap()
    }

    #[test]
    fn packet_sizes() {
        assert_eq!(packet_size(Scheme::Alternating), 1.0);
        assert_eq!(packet_size(Scheme::Replicated), 1.0);
        assert_eq!(packet_size(Scheme::Split), 0.5);
        assert_eq!(packet_size(Scheme::QueueBased), 1.0);
        assert!((packet_size(Scheme::coded(0.75).unwrap()) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            packet_size(Scheme::coded(0.5).unwrap()),
            packet_size(Scheme::Replicated)
        );
        assert_eq!(
            packet_size(Scheme::coded(1.0).unwrap()),
            packet_size(Scheme::Split)
        );
    }

    #[test]
    fn arrival_rates() {
        assert_eq!(arrival_rate(Scheme::Alternating, 1.0), 0.5);
        assert_eq!(arrival_rate(Scheme::Replicated, 2.0), 0.5);
        assert!((arrival_rate(Scheme::coded(0.9).unwrap(), 0.75) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(arrival_rate(Scheme::QueueBased, 1.0), 0.5);
    }

    #[test]
    fn loads() {
        assert_eq!(path_load(&cfg(Scheme::Alternating, 1.0, [1.0, 1.0]), 0), 0.5);
        let rep = cfg(Scheme::Replicated, 0.75, [1.0, 1.0]);
        assert!((path_load(&rep, 1) - 4.0 / 3.0).abs() < 1e-15);
        let coded = cfg(Scheme::coded(0.75).unwrap(), 1.5, [1.0, 1.0]);
        assert!((path_load(&coded, 0) - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn stability() {
        assert!(assert_stable(&cfg(Scheme::Replicated, 1.5, [1.0, 1.0])).is_ok());
        let err = assert_stable(&cfg(Scheme::Replicated, 0.75, [1.0, 1.0])).unwrap_err();
        assert_eq!(err.violations.len(), 2);
        assert!((err.violations[0].1 - 4.0 / 3.0).abs() < 1e-12);
        assert!(assert_stable(&cfg(Scheme::Split, 0.75, [1.0, 1.0])).is_ok());
        // only the slow path violates
        let err = assert_stable(&cfg(Scheme::Replicated, 1.2, [0.5, 2.0])).unwrap_err();
        assert_eq!(err.violations, vec![(1, 1.0 / (1.2 * 0.5))]);
        // load exactly one is unstable
        assert!(assert_stable(&cfg(Scheme::Replicated, 1.0, [1.0, 1.0])).is_err());
        assert!(assert_stable(&cfg(Scheme::coded(2.0 / 3.0).unwrap(), 0.75, [1.0, 1.0])).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PathParams::new(0.0, 0.1).is_err());
        assert!(PathParams::new(1.0, 1.0).is_err());
        assert!(PathParams::new(1.0, -0.1).is_err());
        assert!(Scheme::coded(0.49).is_err());
        assert!(Scheme::coded(1.01).is_err());
        assert!(SystemConfig::from_rates(Scheme::Split, 0.0, [1.0, 1.0], [0.0, 0.0]).is_err());
    }

    #[test]
    fn quality_compatibility() {
        assert!(Scheme::Replicated.check_quality(Quality::Whole).is_ok());
        assert!(Scheme::Replicated.check_quality(Quality::Lq).is_err());
        let c = Scheme::coded(0.75).unwrap();
        assert!(c.check_quality(Quality::Hq).is_ok());
        assert!(c.check_quality(Quality::Whole).is_err());
    }

    #[test]
    fn config_json_roundtrip_validates() {
        let c = cfg(Scheme::coded(0.75).unwrap(), 1.5, [1.0, 1.5]);
        let s = serde_json::to_string(&c).unwrap();
        let back: SystemConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let bad = r#"{"scheme":{"kind":"coded","eta":0.2},"tau":1.0,"paths":[{"mu":1.0},{"mu":1.0}]}"#;
        assert!(serde_json::from_str::<SystemConfig>(bad).is_err());
    }

    proptest! {
        #[test]
        fn load_monotonicity(tau in 0.1f64..10.0, dt in 0.01f64..5.0, mu in 0.1f64..10.0, dm in 0.01f64..5.0,
                             eta in 0.5f64..1.0) {
            for scheme in [Scheme::Alternating, Scheme::Replicated, Scheme::Split, Scheme::coded(eta).unwrap()] {
                let base = cfg(scheme, tau, [mu, mu]);
                let slower = cfg(scheme, tau + dt, [mu, mu]);
                let faster = cfg(scheme, tau, [mu + dm, mu]);
                prop_assert!(path_load(&slower, 0) < path_load(&base, 0));
                prop_assert!(path_load(&faster, 0) < path_load(&base, 0));
                let stable = assert_stable(&base).is_ok();
                prop_assert_eq!(stable, base.loads().iter().all(|&r| r < 1.0 - LOAD_EPS));
            }
            // larger packets (smaller eta) load the path more
            let small = cfg(Scheme::coded(eta).unwrap(), tau, [mu, mu]);
            let big = cfg(Scheme::Replicated, tau, [mu, mu]);
            prop_assert!(path_load(&big, 0) >= path_load(&small, 0));
        }
    }
}
