//! Latency and peak age-of-information analysis for frames delivered over
//! two parallel, erasure-prone links.
//!
//! Frames are generated every `tau` time units and scheduled on two FCFS
//! paths with exponential service. Five schedulers are modelled:
//! alternating (round-robin), replicated, split, coded (multiple
//! description, coding rate `eta`) and a join-the-shortest-queue baseline.
//!
//! The crate provides closed-form latency and PAoI distributions for the
//! first four schemes ([`latency`], [`age`]), a seeded Monte Carlo
//! simulator ([`sim`]), empirical statistics ([`stats`]) and the experiment
//! harness that cross-validates the two ([`experiments`]).

pub mod age;
mod error;
pub mod experiments;
pub mod latency;
pub mod model;
mod numeric;
pub mod queue;
pub mod sim;
pub mod stats;

pub use age::{PaoiCurve, PaoiKind};
pub use error::{Error, Result};
pub use latency::{DistributionCurve, ErasureWeights, ExpTerm};
pub use model::{
    arrival_rate, assert_stable, packet_size, path_load, CodingRate, InstabilityReport, PathParams,
    Quality, Scheme, SystemConfig,
};
pub use queue::SigmaRoot;
pub use sim::{FrameRecord, FrameTrace, PathOutcome, SimOptions};
pub use stats::{Cdf, EmpiricalDistribution};
