//! Seeded Monte Carlo simulation of the two-path system.
//!
//! Frames are generated at `i * tau`. Every packet joins its path's FCFS
//! queue, is served for an exponential time with rate `mu_j / L` and is
//! then erased with probability `epsilon_j`. Erased packets still occupy the
//! server for their full service time.
//!
//! Randomness comes from four ChaCha8 streams derived from one seed:
//! service on path 1 and 2, erasure on path 1 and 2. The k-th packet on a
//! path always uses the k-th draw of that path's streams, so changing
//! `epsilon` never moves a delivery time and schemes with equal packet
//! sizes see identical service times.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};
use std::fs::File;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::model::{assert_stable, Quality, Scheme, SystemConfig};

/// Warm-up frames discarded by default.
pub const DEFAULT_WARMUP: usize = 1000;

const SERVICE_STREAM: [u64; 2] = [0, 1];
const ERASURE_STREAM: [u64; 2] = [2, 3];

/// What happened to a frame's packet on one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathOutcome {
    /// Delivered intact at the given absolute time.
    Delivered(f64),
    Erased,
    NotSent,
}

impl PathOutcome {
    pub fn delivery_time(self) -> Option<f64> {
        match self {
            PathOutcome::Delivered(t) => Some(t),
            _ => None,
        }
    }

    pub fn status(self) -> &'static str {
        match self {
            PathOutcome::Delivered(_) => "delivered",
            PathOutcome::Erased => "erased",
            PathOutcome::NotSent => "notsent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRecord {
    pub index: u64,
    pub gen_time: f64,
    pub paths: [PathOutcome; 2],
}

impl FrameRecord {
    fn delays(&self) -> [Option<f64>; 2] {
        self.paths.map(|p| p.delivery_time().map(|t| t - self.gen_time))
    }
}

/// Output of one simulation run, warm-up already removed.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTrace {
    pub config: SystemConfig,
    pub seed: u64,
    pub records: Vec<FrameRecord>,
    pub warmup_trimmed: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    pub warmup: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            warmup: DEFAULT_WARMUP,
        }
    }
}

struct Streams {
    service: [ChaCha8Rng; 2],
    erasure: [ChaCha8Rng; 2],
}

impl Streams {
    fn new(seed: u64) -> Self {
        let stream = |s: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            rng
        };
        Streams {
            service: SERVICE_STREAM.map(stream),
            erasure: ERASURE_STREAM.map(stream),
        }
    }

    fn service(&mut self, j: usize, rate: f64) -> f64 {
        let e: f64 = self.service[j].sample(Exp1);
        e / rate
    }

    fn erased(&mut self, j: usize, eps: f64) -> bool {
        let u: f64 = self.erasure[j].gen();
        u < eps
    }
}

/// Simulates `n_frames` frames with the default warm-up.
pub fn run(cfg: &SystemConfig, n_frames: usize, seed: u64) -> Result<FrameTrace> {
    run_with(cfg, n_frames, seed, SimOptions::default())
}

/// Simulates `n_frames` frames; the first `opts.warmup` are dropped.
///
/// `n_frames` must be at least twice the warm-up. Unstable configurations
/// run, with a warning attached to the trace.
pub fn run_with(cfg: &SystemConfig, n_frames: usize, seed: u64, opts: SimOptions) -> Result<FrameTrace> {
    if n_frames == 0 || n_frames < 2 * opts.warmup {
        return Err(Error::InvalidParameter {
            name: "n_frames",
            value: n_frames as f64,
            reason: "need at least twice the warm-up length",
        });
    }
    let records = match cfg.scheme() {
        Scheme::QueueBased => event_driven(cfg, n_frames, seed),
        _ => lindley(cfg, n_frames, seed),
    };
    Ok(finish(cfg, seed, records, opts.warmup))
}

fn finish(cfg: &SystemConfig, seed: u64, mut records: Vec<FrameRecord>, warmup: usize) -> FrameTrace {
    let mut warnings = Vec::new();
    if let Err(report) = assert_stable(cfg) {
        warnings.push(format!("{report}; queues grow without bound"));
    }
    records.drain(..warmup);
    FrameTrace {
        config: *cfg,
        seed,
        records,
        warmup_trimmed: warmup,
        warnings,
    }
}

fn sends_on(scheme: Scheme, index: usize) -> [bool; 2] {
    match scheme {
        Scheme::Alternating => [index.is_multiple_of(2), !index.is_multiple_of(2)],
        _ => [true, true],
    }
}

/// Per-path Lindley recursion `d_k = max(a_k, d_{k-1}) + S_k`.
fn lindley(cfg: &SystemConfig, n_frames: usize, seed: u64) -> Vec<FrameRecord> {
    let mut rng = Streams::new(seed);
    let rate = [cfg.effective_rate(0), cfg.effective_rate(1)];
    let eps = cfg.epsilons();
    let tau = cfg.tau();
    let mut last = [f64::NEG_INFINITY; 2];
    (0..n_frames)
        .map(|i| {
            let gen_time = i as f64 * tau;
            let send = sends_on(cfg.scheme(), i);
            let mut paths = [PathOutcome::NotSent; 2];
            for j in 0..2 {
                if !send[j] {
                    continue;
                }
                let d = gen_time.max(last[j]) + rng.service(j, rate[j]);
                last[j] = d;
                paths[j] = if rng.erased(j, eps[j]) {
                    PathOutcome::Erased
                } else {
                    PathOutcome::Delivered(d)
                };
            }
            FrameRecord {
                index: i as u64,
                gen_time,
                paths,
            }
        })
        .collect()
}

/// Path chosen by the queue-based scheduler from the numbers of packets in
/// system just before the arrival.
fn shortest_queue(in_system: [usize; 2], mu: [f64; 2]) -> usize {
    match in_system[0].cmp(&in_system[1]) {
        Ordering::Less => 0,
        Ordering::Greater => 1,
        Ordering::Equal if mu[1] > mu[0] => 1,
        Ordering::Equal => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Event {
    // departures sort first at equal times so the arrival sees them gone
    Departure(usize),
    Arrival(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Timed(f64, Event);

impl Eq for Timed {}

impl Ord for Timed {
    fn cmp(&self, other: &Self) -> Ordering {
        let rank = |e: &Event| match e {
            Event::Departure(j) => *j,
            Event::Arrival(_) => 2,
        };
        self.0.total_cmp(&other.0).then(rank(&self.1).cmp(&rank(&other.1)))
    }
}

impl PartialOrd for Timed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Default)]
struct Server {
    queue: VecDeque<usize>,
    busy: bool,
}

/// Reference event-driven engine. Handles every scheme; the queue-based
/// scheduler needs it because the path choice depends on both queues.
fn event_driven(cfg: &SystemConfig, n_frames: usize, seed: u64) -> Vec<FrameRecord> {
    let mut rng = Streams::new(seed);
    let rate = [cfg.effective_rate(0), cfg.effective_rate(1)];
    let eps = cfg.epsilons();
    let mu = cfg.mus();
    let tau = cfg.tau();
    let mut records: Vec<FrameRecord> = (0..n_frames)
        .map(|i| FrameRecord {
            index: i as u64,
            gen_time: i as f64 * tau,
            paths: [PathOutcome::NotSent; 2],
        })
        .collect();
    let mut servers: [Server; 2] = Default::default();
    let mut events = BinaryHeap::new();
    events.push(Reverse(Timed(0.0, Event::Arrival(0))));

    let start = |server: &mut Server, j: usize, now: f64, rng: &mut Streams, events: &mut BinaryHeap<Reverse<Timed>>| {
        if !server.busy && !server.queue.is_empty() {
            server.busy = true;
            events.push(Reverse(Timed(now + rng.service(j, rate[j]), Event::Departure(j))));
        }
    };

    while let Some(Reverse(Timed(now, event))) = events.pop() {
        match event {
            Event::Arrival(i) => {
                let targets = match cfg.scheme() {
                    Scheme::QueueBased => {
                        let n = [0, 1].map(|j| servers[j].queue.len());
                        let mut t = [false; 2];
                        t[shortest_queue(n, mu)] = true;
                        t
                    }
                    s => sends_on(s, i),
                };
                for j in 0..2 {
                    if targets[j] {
                        servers[j].queue.push_back(i);
                        start(&mut servers[j], j, now, &mut rng, &mut events);
                    }
                }
                if i + 1 < n_frames {
                    events.push(Reverse(Timed((i + 1) as f64 * tau, Event::Arrival(i + 1))));
                }
            }
            Event::Departure(j) => {
                let i = servers[j].queue.pop_front().expect("departure from an empty queue");
                servers[j].busy = false;
                records[i].paths[j] = if rng.erased(j, eps[j]) {
                    PathOutcome::Erased
                } else {
                    PathOutcome::Delivered(now)
                };
                start(&mut servers[j], j, now, &mut rng, &mut events);
                debug_assert!(servers[j].queue.is_empty() || servers[j].busy);
            }
        }
    }
    records
}

/// Reception time of a frame at `quality`, if it is decoded at all.
///
/// Replicated and coded low quality need the first packet, split and coded
/// high quality both (coded high quality at `eta = 0.5` only one, since
/// each descriptor is the whole frame).
fn reception(scheme: Scheme, quality: Quality, rec: &FrameRecord) -> Option<f64> {
    let [a, b] = rec.paths.map(PathOutcome::delivery_time);
    let first = || match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    };
    let both = || Some(a?.max(b?));
    match scheme {
        Scheme::Alternating | Scheme::QueueBased | Scheme::Replicated => first(),
        Scheme::Split => both(),
        Scheme::Coded { eta } => match quality {
            Quality::Hq if eta.get() > 0.5 => both(),
            _ => first(),
        },
    }
}

fn receptions(trace: &FrameTrace, quality: Quality) -> Result<Vec<(f64, f64)>> {
    let scheme = trace.config.scheme();
    scheme.check_quality(quality)?;
    Ok(trace
        .records
        .iter()
        .filter_map(|r| reception(scheme, quality, r).map(|t| (t, r.gen_time)))
        .collect())
}

/// Latencies of frames decoded at `quality`, in frame order.
pub fn extract_latencies(trace: &FrameTrace, quality: Quality) -> Result<Vec<f64>> {
    Ok(receptions(trace, quality)?.into_iter().map(|(t, g)| t - g).collect())
}

/// Fraction of recorded frames decoded at `quality`.
pub fn delivered_fraction(trace: &FrameTrace, quality: Quality) -> Result<f64> {
    let n = receptions(trace, quality)?.len();
    Ok(n as f64 / trace.records.len() as f64)
}

/// Peak ages at every informative reception.
///
/// Receptions are replayed in time order; one is informative when its
/// frame is strictly newer than the displayed one, and yields the
/// reception time minus the displayed frame's generation time. The first
/// reception only initializes the display. Stale receptions are dropped.
pub fn extract_paoi(trace: &FrameTrace, quality: Quality) -> Result<Vec<f64>> {
    let mut rx = receptions(trace, quality)?;
    rx.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out = Vec::with_capacity(rx.len());
    let mut shown: Option<f64> = None;
    for (t, g) in rx {
        match shown {
            Some(s) if g <= s => {}
            Some(s) => {
                out.push(t - s);
                shown = Some(g);
            }
            None => shown = Some(g),
        }
    }
    Ok(out)
}

/// Reception time of every decoded frame minus the generation time of the
/// previous decoded frame in generation order.
///
/// Equals [`extract_paoi`] when frames are received in order. Under
/// erasures a replicated or coded-LQ frame can be overtaken by its
/// successor on the other path; this variant still counts it, which is
/// the quantity the synchronized closed form describes.
pub fn extract_frame_order_ages(trace: &FrameTrace, quality: Quality) -> Result<Vec<f64>> {
    let rx = receptions(trace, quality)?;
    Ok(rx.windows(2).map(|w| w[1].0 - w[0].1).collect())
}

/// Number of decoded frames received after a newer decoded frame.
pub fn overtaken_frames(trace: &FrameTrace, quality: Quality) -> Result<usize> {
    let rx = receptions(trace, quality)?;
    let mut earliest_newer = f64::INFINITY;
    let mut count = 0;
    for &(t, _) in rx.iter().rev() {
        if t > earliest_newer {
            count += 1;
        }
        earliest_newer = earliest_newer.min(t);
    }
    Ok(count)
}

/// Delays of the packets delivered on path `j` (index 0 or 1).
pub fn path_delays(trace: &FrameTrace, j: usize) -> Vec<f64> {
    trace.records.iter().filter_map(|r| r.delays()[j]).collect()
}

/// Writes one CSV row per frame:
/// `index,gen_time,path1_status,path1_time,path2_status,path2_time`.
pub fn write_trace_csv<W: Write>(trace: &FrameTrace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "gen_time", "path1_status", "path1_time", "path2_status", "path2_time"])?;
    for r in &trace.records {
        let time = |p: PathOutcome| p.delivery_time().map(|t| t.to_string()).unwrap_or_default();
        w.write_record([
            r.index.to_string(),
            r.gen_time.to_string(),
            r.paths[0].status().to_string(),
            time(r.paths[0]),
            r.paths[1].status().to_string(),
            time(r.paths[1]),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn save_trace_csv(trace: &FrameTrace, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_trace_csv(trace, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CodingRate;

    fn cfg(scheme: Scheme, tau: f64, mu: [f64; 2], eps: [f64; 2]) -> SystemConfig {
        SystemConfig::from_rates(scheme, tau, mu, eps).unwrap()
    }

    const SCHEMES: [Scheme; 5] = [
        Scheme::Alternating,
        Scheme::Replicated,
        Scheme::Split,
        Scheme::Coded { eta: CodingRate::SPLIT },
        Scheme::QueueBased,
    ];

    #[test]
    fn deterministic() {
        for s in SCHEMES {
            let c = cfg(s, 1.5, [1.0, 1.5], [0.2, 0.1]);
            assert_eq!(run(&c, 5000, 7).unwrap(), run(&c, 5000, 7).unwrap());
            assert_ne!(run(&c, 5000, 7).unwrap().records, run(&c, 5000, 8).unwrap().records);
        }
    }

    #[test]
    fn trims_warmup() {
        let c = cfg(Scheme::Split, 1.5, [1.0, 1.0], [0.0, 0.0]);
        let t = run(&c, 3000, 1).unwrap();
        assert_eq!(t.records.len(), 2000);
        assert_eq!(t.warmup_trimmed, 1000);
        assert_eq!(t.records[0].index, 1000);
        assert!(run(&c, 1999, 1).is_err());
        let t = run_with(&c, 10, 1, SimOptions { warmup: 0 }).unwrap();
        assert_eq!(t.records.len(), 10);
    }

    #[test]
    fn fcfs_and_causality() {
        for s in SCHEMES {
            let c = cfg(s, 1.0, [1.0, 1.3], [0.0, 0.0]);
            let t = run_with(&c, 20_000, 3, SimOptions { warmup: 0 }).unwrap();
            let mut last = [0.0f64; 2];
            for r in &t.records {
                for j in 0..2 {
                    if let Some(d) = r.paths[j].delivery_time() {
                        assert!(d > r.gen_time);
                        assert!(d >= last[j], "{s}: FCFS violated");
                        last[j] = d;
                    }
                }
            }
        }
    }

    #[test]
    fn event_engine_matches_lindley() {
        for s in &SCHEMES[..4] {
            let c = cfg(*s, 1.2, [1.0, 1.4], [0.3, 0.1]);
            assert_eq!(event_driven(&c, 20_000, 11), lindley(&c, 20_000, 11), "{s}");
        }
    }

    #[test]
    fn erasures_do_not_move_deliveries() {
        for s in SCHEMES {
            let free = run(&cfg(s, 1.5, [1.0, 1.2], [0.0, 0.0]), 10_000, 5).unwrap();
            let lossy = run(&cfg(s, 1.5, [1.0, 1.2], [0.3, 0.2]), 10_000, 5).unwrap();
            let mut erased = 0;
            for (a, b) in free.records.iter().zip(&lossy.records) {
                for j in 0..2 {
                    match b.paths[j] {
                        PathOutcome::Delivered(t) => assert_eq!(a.paths[j], PathOutcome::Delivered(t)),
                        PathOutcome::Erased => {
                            erased += 1;
                            assert!(matches!(a.paths[j], PathOutcome::Delivered(_)));
                        }
                        PathOutcome::NotSent => assert_eq!(a.paths[j], PathOutcome::NotSent),
                    }
                }
            }
            assert!(erased > 0 || s == Scheme::QueueBased);
        }
    }

    #[test]
    fn replicated_has_two_deliveries() {
        let t = run(&cfg(Scheme::Replicated, 1.5, [1.0, 1.0], [0.0, 0.0]), 4000, 2).unwrap();
        for r in &t.records {
            let [a, b] = r.delays();
            assert!(a.is_some() && b.is_some());
        }
        let lat = extract_latencies(&t, Quality::Whole).unwrap();
        assert_eq!(lat.len(), t.records.len());
    }

    #[test]
    fn alternating_uses_one_path() {
        let t = run(&cfg(Scheme::Alternating, 1.0, [1.0, 1.0], [0.0, 0.0]), 4000, 2).unwrap();
        for r in &t.records {
            let even = r.index % 2 == 0;
            assert_eq!(r.paths[if even { 1 } else { 0 }], PathOutcome::NotSent);
        }
    }

    #[test]
    fn queue_based_tie_breaking() {
        assert_eq!(shortest_queue([0, 0], [1.0, 1.0]), 0);
        assert_eq!(shortest_queue([0, 0], [1.0, 1.5]), 1);
        assert_eq!(shortest_queue([2, 1], [1.0, 0.5]), 1);
        assert_eq!(shortest_queue([1, 2], [0.5, 1.0]), 0);
        // at low load every frame finds both paths empty
        let t = run(&cfg(Scheme::QueueBased, 500.0, [1.0, 1.5], [0.0, 0.0]), 3000, 4).unwrap();
        assert!(t.records.iter().all(|r| r.paths[0] == PathOutcome::NotSent));
    }

    #[test]
    fn extraction_semantics() {
        let rec = |i: u64, g: f64, a: PathOutcome, b: PathOutcome| FrameRecord {
            index: i,
            gen_time: g,
            paths: [a, b],
        };
        use PathOutcome::*;
        let trace = |scheme| FrameTrace {
            config: cfg(scheme, 1.0, [1.0, 1.0], [0.0, 0.0]),
            seed: 0,
            records: vec![
                rec(0, 0.0, Delivered(0.5), Delivered(0.7)),
                rec(1, 1.0, Delivered(1.9), Erased),
                rec(2, 2.0, Erased, Erased),
                rec(3, 3.0, Delivered(3.2), Delivered(3.4)),
            ],
            warmup_trimmed: 0,
            warnings: vec![],
        };
        let rep = trace(Scheme::Replicated);
        assert_eq!(extract_latencies(&rep, Quality::Whole).unwrap().len(), 3);
        assert!((extract_latencies(&rep, Quality::Whole).unwrap()[1] - 0.9).abs() < 1e-12);
        let split = trace(Scheme::Split);
        let lat = extract_latencies(&split, Quality::Whole).unwrap();
        assert_eq!(lat.len(), 2);
        assert!((lat[0] - 0.7).abs() < 1e-12 && (lat[1] - 0.4).abs() < 1e-12);
        assert!((delivered_fraction(&split, Quality::Whole).unwrap() - 0.5).abs() < 1e-12);
        let ages = extract_paoi(&split, Quality::Whole).unwrap();
        assert_eq!(ages.len(), 1);
        assert!((ages[0] - 3.4).abs() < 1e-12);
        assert!(extract_latencies(&split, Quality::Lq).is_err());
    }

    #[test]
    fn stale_receptions_are_dropped() {
        use PathOutcome::*;
        let records = vec![
            FrameRecord { index: 0, gen_time: 0.0, paths: [Delivered(0.5), NotSent] },
            FrameRecord { index: 1, gen_time: 1.0, paths: [NotSent, Delivered(5.0)] },
            FrameRecord { index: 2, gen_time: 2.0, paths: [Delivered(2.5), NotSent] },
            FrameRecord { index: 3, gen_time: 3.0, paths: [NotSent, Delivered(5.5)] },
        ];
        let t = FrameTrace {
            config: cfg(Scheme::Alternating, 1.0, [1.0, 1.0], [0.0, 0.0]),
            seed: 0,
            records,
            warmup_trimmed: 0,
            warnings: vec![],
        };
        // frame 1 is overtaken by frame 2; the age at frame 2 spans two periods
        assert_eq!(extract_paoi(&t, Quality::Whole).unwrap(), vec![2.5, 3.5]);
    }

    #[test]
    fn full_success_paoi_is_latency_plus_tau() {
        let t = run(&cfg(Scheme::Replicated, 1.5, [1.0, 1.0], [0.0, 0.0]), 5000, 9).unwrap();
        let lat = extract_latencies(&t, Quality::Whole).unwrap();
        let ages = extract_paoi(&t, Quality::Whole).unwrap();
        assert_eq!(ages.len(), lat.len() - 1);
        for (a, l) in ages.iter().zip(&lat[1..]) {
            assert!((a - (l + 1.5)).abs() < 1e-9);
        }
    }

    #[test]
    fn frame_order_ages_agree_without_overtaking() {
        let free = run(&cfg(Scheme::Replicated, 1.5, [1.0, 1.0], [0.0, 0.0]), 5000, 9).unwrap();
        assert_eq!(overtaken_frames(&free, Quality::Whole).unwrap(), 0);
        assert_eq!(
            extract_frame_order_ages(&free, Quality::Whole).unwrap(),
            extract_paoi(&free, Quality::Whole).unwrap()
        );
        let lossy = run(&cfg(Scheme::Replicated, 1.5, [1.0, 1.0], [0.2, 0.2]), 5000, 9).unwrap();
        let overtaken = overtaken_frames(&lossy, Quality::Whole).unwrap();
        assert!(overtaken > 0);
        let ordered = extract_frame_order_ages(&lossy, Quality::Whole).unwrap();
        let peaks = extract_paoi(&lossy, Quality::Whole).unwrap();
        assert_eq!(ordered.len(), peaks.len() + overtaken);
        let split = run(&cfg(Scheme::Split, 1.5, [1.0, 1.0], [0.3, 0.3]), 5000, 9).unwrap();
        assert_eq!(overtaken_frames(&split, Quality::Whole).unwrap(), 0);
    }

    #[test]
    fn unstable_runs_warn() {
        let t = run(&cfg(Scheme::Replicated, 0.9, [1.0, 1.0], [0.0, 0.0]), 3000, 1).unwrap();
        assert_eq!(t.warnings.len(), 1);
        let t = run(&cfg(Scheme::Replicated, 1.5, [1.0, 1.0], [0.0, 0.0]), 3000, 1).unwrap();
        assert!(t.warnings.is_empty());
    }

    #[test]
    fn trace_csv_layout() {
        let t = run(&cfg(Scheme::Alternating, 1.0, [1.0, 1.0], [0.5, 0.0]), 2000, 1).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "index,gen_time,path1_status,path1_time,path2_status,path2_time");
        assert_eq!(lines.clone().count(), 1000);
        assert!(text.contains(",erased,,notsent,\n"));
        assert!(text.contains(",notsent,,delivered,"));
    }
}
