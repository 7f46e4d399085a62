//! Shared fixtures for the criterion benchmarks.

use mpath_core::{Scheme, SystemConfig};

/// Balanced two-path system with unit service rates.
pub fn balanced(scheme: Scheme, tau: f64, epsilon: f64) -> SystemConfig {
    SystemConfig::from_rates(scheme, tau, [1.0, 1.0], [epsilon, epsilon]).expect("valid benchmark config")
}

pub fn analytic_schemes() -> [Scheme; 4] {
    [
        Scheme::Alternating,
        Scheme::Replicated,
        Scheme::Split,
        Scheme::coded(0.75).expect("valid coding rate"),
    ]
}
