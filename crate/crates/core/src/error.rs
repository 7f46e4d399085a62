use std::path::PathBuf;

use crate::model::{InstabilityReport, Quality, Scheme};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(transparent)]
    Unstable(#[from] InstabilityReport),

    #[error("no root of x = exp(a(x-1)) in (0,1) for a = {0}: stability requires a > 1 (load < 1)")]
    SigmaDomain(f64),

    #[error("{0} has no closed-form analysis; it is simulation-only")]
    SimulationOnly(Scheme),

    #[error("{operation} is not defined for {scheme}")]
    UnsupportedScheme {
        operation: &'static str,
        scheme: Scheme,
    },

    #[error("quality {quality} is not reported for {scheme}")]
    IncompatibleQuality { scheme: Scheme, quality: Quality },

    #[error("empirical distribution needs at least one sample")]
    EmptySample,

    #[error("success probability is zero: no frame is ever delivered, PAoI is undefined")]
    NoDelivery,

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
