//! `mpath`: analytic and simulated latency / peak-age experiments for
//! two-path frame delivery. Results are written as long-format CSV.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use mpath_core::experiments::presets::{self, PresetOptions, DEFAULT_SEED};
use mpath_core::experiments::{emit_csv, run_scenario, sweep, write_csv, Scenario, SweepSpec, Table};
use mpath_core::sim;

#[derive(Parser, Debug)]
#[command(name = "mpath", version, about = "Latency and peak age of information over two parallel lossy paths")]
struct Cli {
    /// Seed of the simulator's random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Frames to simulate (the first 1000 are discarded).
    #[arg(long, global = true)]
    frames: Option<usize>,
    /// Output CSV file; standard output if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Points per cdf curve, or grid size of a sweep without an explicit grid.
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form results only.
    Analytic(ScenarioArgs),
    /// Monte Carlo results only.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Also dump the per-frame trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Analytic and simulated results with their KS distance or gap.
    Compare(ScenarioArgs),
    /// Vary tau, eta or epsilon over a grid.
    Sweep(SweepArgs),
    /// Run a named experiment family.
    Preset { name: String },
    /// List the named experiment families.
    ListPresets,
}

/// Scenario options. Values given here override the config file.
#[derive(Args, Debug, Default)]
struct ScenarioArgs {
    /// JSON scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    /// alternating, replicated, split, coded[:eta] or queue_based.
    #[arg(long)]
    scheme: Option<String>,
    /// Coding rate of the coded scheme, in [0.5, 1].
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    mu1: Option<f64>,
    #[arg(long)]
    mu2: Option<f64>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    /// latency_cdf, paoi_cdf, p99_latency, p99_paoi or delivery_prob (repeatable).
    #[arg(long = "metric")]
    metrics: Vec<String>,
    /// whole, lq or hq (repeatable).
    #[arg(long = "quality")]
    qualities: Vec<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Scenario flags apply to `base`; `--config` names a JSON sweep file
    /// with `base`, `axis`, `grid`, `schemes` and `optimize`.
    #[command(flatten)]
    base: ScenarioArgs,
    /// tau, eta or epsilon.
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated grid values.
    #[arg(long, value_delimiter = ',')]
    grid: Vec<f64>,
    /// Comma-separated schemes evaluated at every grid point.
    #[arg(long, value_delimiter = ',')]
    schemes: Vec<String>,
    /// minimize_p99_paoi or minimize_p99_latency.
    #[arg(long)]
    optimize: Option<String>,
}

/// Marks failures reading or writing files.
#[derive(Debug)]
struct IoFailure(String);

impl std::fmt::Display for IoFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for IoFailure {}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| IoFailure(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).with_context(|| format!("invalid JSON in {}", path.display()))
}

fn object(v: &mut Value) -> Result<&mut Map<String, Value>> {
    v.as_object_mut().ok_or_else(|| anyhow!("expected a JSON object"))
}

fn scheme_json(text: &str, eta: Option<f64>) -> Result<Value> {
    let (kind, inline_eta) = match text.split_once(':') {
        Some((k, e)) => (k, Some(e.parse::<f64>().with_context(|| format!("bad coding rate in `{text}`"))?)),
        None => (text, None),
    };
    let kind = kind.trim().to_ascii_lowercase().replace('-', "_");
    match kind.as_str() {
        "alternating" | "replicated" | "split" | "queue_based" => Ok(json!({ "kind": kind })),
        "coded" => {
            let eta = inline_eta.or(eta).ok_or_else(|| anyhow!("coded scheme needs a coding rate (coded:0.75 or --eta)"))?;
            Ok(json!({ "kind": "coded", "eta": eta }))
        }
        other => bail!("unknown scheme `{other}`"),
    }
}

/// Merges file values, command-line overrides and defaults into a scenario.
fn scenario_value(mut v: Value, args: &ScenarioArgs, cli: &Cli) -> Result<Value> {
    let obj = object(&mut v)?;
    obj.entry("name").or_insert(json!("cli"));
    if let Some(n) = &args.name {
        obj.insert("name".into(), json!(n));
    }
    let cfg = obj.entry("cfg").or_insert(json!({}));
    let cfg = object(cfg)?;
    if let Some(s) = &args.scheme {
        cfg.insert("scheme".into(), scheme_json(s, args.eta)?);
    } else if let Some(eta) = args.eta {
        cfg.insert("scheme".into(), json!({ "kind": "coded", "eta": eta }));
    }
    if let Some(t) = args.tau {
        cfg.insert("tau".into(), json!(t));
    }
    let paths = cfg.entry("paths").or_insert(json!([{ "mu": 1.0 }, { "mu": 1.0 }]));
    let paths = paths.as_array_mut().filter(|p| p.len() == 2).ok_or_else(|| anyhow!("cfg.paths must list two paths"))?;
    for (j, (mu, eps)) in [(args.mu1, args.eps1), (args.mu2, args.eps2)].into_iter().enumerate() {
        let p = object(&mut paths[j])?;
        if let Some(m) = mu {
            p.insert("mu".into(), json!(m));
        }
        if let Some(e) = eps {
            p.insert("epsilon".into(), json!(e));
        }
    }
    if !args.metrics.is_empty() {
        obj.insert("metrics".into(), json!(args.metrics));
    }
    obj.entry("metrics").or_insert(json!(["p99_latency", "p99_paoi", "delivery_prob"]));
    if !args.qualities.is_empty() {
        let q: Vec<String> = args.qualities.iter().map(|q| q.to_ascii_lowercase()).collect();
        obj.insert("qualities".into(), json!(q));
    }
    if let Some(s) = cli.seed {
        obj.insert("seed".into(), json!(s));
    }
    if let Some(f) = cli.frames {
        obj.insert("n_frames".into(), json!(f));
    }
    Ok(v)
}

fn load_scenario(args: &ScenarioArgs, cli: &Cli) -> Result<Scenario> {
    let file = match &args.config {
        Some(p) => read_json(p)?,
        None => json!({}),
    };
    let mut v = scenario_value(file, args, cli)?;
    if let Some(g) = cli.grid_points {
        object(&mut v)?.insert("grid_points".into(), json!(g));
    }
    let scn: Scenario = serde_json::from_value(v).context("invalid scenario")?;
    scn.validate()?;
    Ok(scn)
}

fn default_grid(axis: &str, n: usize) -> Result<Vec<f64>> {
    let n = n.max(2);
    let linear = |lo: f64, hi: f64| (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
    Ok(match axis {
        "tau" => mpath_core::stats::log_grid(0.6, 8.0, n),
        "eta" => linear(0.5, 1.0),
        "epsilon" => linear(0.0, 0.4),
        other => bail!("unknown axis `{other}`"),
    })
}

fn load_sweep(args: &SweepArgs, cli: &Cli) -> Result<SweepSpec> {
    let mut v = match &args.base.config {
        Some(p) => read_json(p)?,
        None => json!({}),
    };
    let obj = object(&mut v)?;
    let base = obj.remove("base").unwrap_or(json!({}));
    obj.insert("base".into(), scenario_value(base, &args.base, cli)?);
    if let Some(a) = &args.axis {
        obj.insert("axis".into(), json!(a.to_ascii_lowercase()));
    }
    if !args.grid.is_empty() {
        obj.insert("grid".into(), json!(args.grid));
    } else if !obj.contains_key("grid") || cli.grid_points.is_some() {
        let axis = obj.get("axis").and_then(Value::as_str).ok_or_else(|| anyhow!("sweep needs --axis"))?;
        let grid = default_grid(axis, cli.grid_points.unwrap_or(16))?;
        obj.insert("grid".into(), json!(grid));
    }
    if !args.schemes.is_empty() {
        let schemes = args
            .schemes
            .iter()
            .map(|s| scheme_json(s, args.base.eta))
            .collect::<Result<Vec<_>>>()?;
        obj.insert("schemes".into(), Value::Array(schemes));
    }
    if let Some(o) = &args.optimize {
        obj.insert("optimize".into(), json!(o.to_ascii_lowercase()));
    }
    // the swept coordinate and the scheme list can stand in for missing base fields
    let first_grid = obj.get("grid").and_then(|g| g.get(0)).cloned();
    let first_scheme = obj.get("schemes").and_then(|s| s.get(0)).cloned();
    let on_tau = obj.get("axis").and_then(Value::as_str) == Some("tau");
    if let Some(cfg) = obj.get_mut("base").and_then(|b| b.get_mut("cfg")).and_then(Value::as_object_mut) {
        if let (true, Some(t)) = (on_tau, first_grid) {
            cfg.entry("tau").or_insert(t);
        }
        if let Some(s) = first_scheme {
            cfg.entry("scheme").or_insert(s);
        }
    }
    let spec: SweepSpec = serde_json::from_value(v).context("invalid sweep")?;
    spec.validate()?;
    Ok(spec)
}

fn output(table: &Table, out: Option<&Path>) -> Result<()> {
    for n in &table.notices {
        eprintln!("note: {n}");
    }
    match out {
        Some(p) => emit_csv(table, p)?,
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_csv(table, &mut lock)?;
            lock.flush().map_err(|e| IoFailure(format!("cannot write output: {e}")))?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Analytic(a) => {
            let scn = Scenario {
                simulated: false,
                ..load_scenario(a, cli)?
            };
            output(&run_scenario(&scn)?, out)
        }
        Command::Simulate { scenario, trace } => {
            let scn = Scenario {
                analytic: false,
                ..load_scenario(scenario, cli)?
            };
            if let Some(path) = trace {
                let t = sim::run(&scn.cfg, scn.n_frames, scn.seed)?;
                sim::save_trace_csv(&t, path)?;
            }
            output(&run_scenario(&scn)?, out)
        }
        Command::Compare(a) => output(&run_scenario(&load_scenario(a, cli)?)?, out),
        Command::Sweep(s) => output(&sweep(&load_sweep(s, cli)?)?, out),
        Command::Preset { name } => {
            let preset = presets::preset(name)?;
            let defaults = PresetOptions::default();
            let opts = PresetOptions {
                n_frames: cli.frames.unwrap_or(defaults.n_frames),
                seed: cli.seed.unwrap_or(DEFAULT_SEED),
                grid_points: cli.grid_points,
            };
            output(&preset.run(&opts)?, out)
        }
        Command::ListPresets => {
            let mut text = String::new();
            for p in presets::presets() {
                text.push_str(&format!("{:<26}{}\n", p.name, p.description));
            }
            match out {
                Some(p) => fs::write(p, text).map_err(|e| IoFailure(format!("cannot write {}: {e}", p.display())))?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

/// 2 for file-system failures, 1 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    let io = err.chain().any(|c| {
        c.is::<IoFailure>() || c.is::<io::Error>() || matches!(c.downcast_ref(), Some(mpath_core::Error::Io { .. }))
    });
    if io {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
