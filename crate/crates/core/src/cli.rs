//! Command-line front end.
//!
//! ```text
//! semistream run --alg bfs-rand --gen gnp:500,0.02 --seed 7 --k 66
//! semistream run --alg mlst --stream g.txt --epsilon 0.9 --out tree.json
//! semistream bench acceptance --criterion 5
//! ```
//!
//! `run` writes its result JSON (or stream text for certificates) and a
//! `meter/v1` JSON report. With `--out PATH` they go to `PATH` and
//! `PATH.meter.json` (BFS distance tables also to `PATH.dist.csv`);
//! otherwise both are printed to stdout, result first. Nothing is written
//! unless the run succeeds.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::acceptance::{run_suite, CRITERIA};
use crate::bfs::{bfs_deterministic, bfs_randomized, diameter_approx, steiner_2approx, BfsConfig};
use crate::cert::{edge_certificate_insertion, vc_certificate};
use crate::dfs::{dfs_aa, dfs_simple};
use crate::error::{with_retries, Error, Result};
use crate::graph::Node;
use crate::harness::{generate, parse_stream, write_edges, GraphStream, Generator, Meter, Model, StreamSession};
use crate::mlst::{approx_mlst, build_sparsifier, connected_max_cut, k_for_epsilon};
use crate::tree::RootedTree;

pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const DOMAIN: i32 = 3;
    pub const RETRIES: i32 = 4;
    pub const BUDGET: i32 = 5;
    pub const MALFORMED: i32 = 6;
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) => exit::USAGE,
        Error::Domain(_) => exit::DOMAIN,
        Error::Retryable(_) | Error::RetriesExhausted { .. } => exit::RETRIES,
        Error::BudgetExceeded { .. } => exit::BUDGET,
        Error::MalformedStream(_) => exit::MALFORMED,
        _ => exit::OTHER,
    }
}

#[derive(Parser, Debug)]
#[command(name = "semistream", version, about = "Semi-streaming spanning tree algorithms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one algorithm on a stream file or a generated graph.
    Run(RunConfig),
    /// Run the acceptance suite and print one row per criterion.
    Bench(BenchConfig),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Mlst,
    Sparsifier,
    MaxCut,
    BfsDet,
    BfsRand,
    Diameter,
    Steiner,
    DfsSimple,
    DfsAa,
    CertVc,
    CertEdge,
}

impl Algorithm {
    fn id(self) -> &'static str {
        match self {
            Algorithm::Mlst => "mlst",
            Algorithm::Sparsifier => "sparsifier",
            Algorithm::MaxCut => "max-cut",
            Algorithm::BfsDet => "bfs-det",
            Algorithm::BfsRand => "bfs-rand",
            Algorithm::Diameter => "diameter",
            Algorithm::Steiner => "steiner",
            Algorithm::DfsSimple => "dfs-simple",
            Algorithm::DfsAa => "dfs-aa",
            Algorithm::CertVc => "cert-vc",
            Algorithm::CertEdge => "cert-edge",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub alg: Algorithm,
    /// Stream file (`n <N> model <ins|turn>` header, then `+ u v` / `- u v` lines).
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    pub stream: Option<PathBuf>,
    /// Generator, e.g. `gnp:500,0.02`, `regular:12,4`, `path:20`, `layered:1000,25`.
    #[arg(long)]
    pub gen: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Mix deletions into a generated stream (turnstile model).
    #[arg(long)]
    pub turnstile: bool,
    #[arg(long, default_value_t = 0)]
    pub root: Node,
    /// Center budget (bfs-rand, diameter, steiner) or layer depth (dfs).
    #[arg(long)]
    pub k: Option<usize>,
    /// Connectivity parameter (certificates, dfs-aa batch size).
    #[arg(long)]
    pub s: Option<usize>,
    /// Pass parameter of bfs-det.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// The constant C in the randomized BFS radius.
    #[arg(long, default_value_t = 3.0)]
    pub confidence: f64,
    /// Comma-separated terminal nodes for steiner.
    #[arg(long, value_delimiter = ',')]
    pub terminals: Vec<Node>,
    /// Fail when the peak space exceeds the calibrated budget.
    #[arg(long)]
    pub strict_budget: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BenchConfig {
    /// Suite id; `acceptance` is the only suite.
    pub suite: String,
    /// Only run these criteria.
    #[arg(long = "criterion")]
    pub criteria: Vec<u32>,
    /// Also write the machine-readable report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Artifacts of a successful run.
pub struct RunOutput {
    pub result: String,
    pub meter: String,
    pub table: Option<String>,
}

fn load(cfg: &RunConfig) -> Result<GraphStream> {
    let stream = match (&cfg.stream, &cfg.gen) {
        (Some(path), _) => parse_stream(&std::fs::read_to_string(path)?)?,
        (None, Some(g)) => generate(&g.parse::<Generator>()?, cfg.seed)?,
        (None, None) => return Err(Error::Parameter("one of --stream and --gen is required".into())),
    };
    if cfg.turnstile {
        if cfg.stream.is_some() {
            return Err(Error::Parameter("--turnstile only applies to generated streams".into()));
        }
        return stream.with_churn(cfg.seed, stream.n());
    }
    Ok(stream)
}

fn need(v: Option<usize>, name: &str) -> Result<usize> {
    match v {
        Some(0) => Err(Error::Parameter(format!("--{name} must be positive"))),
        Some(v) => Ok(v),
        None => Err(Error::Parameter(format!("--{name} is required for this algorithm"))),
    }
}

fn log2(n: usize) -> usize {
    (usize::BITS - n.max(2).leading_zeros()) as usize
}

/// Words the algorithm may hold in strict mode: calibrated constant times
/// n log n times the algorithm's own space factor, and another 32 log^2 n
/// for the ℓ0 samplers of turnstile streams. Deterministic BFS also gets
/// the n * ceil(n/p) stored neighbours.
pub fn space_budget(cfg: &RunConfig, n: usize, model: Model) -> Result<usize> {
    let sketches = match model {
        Model::InsertionOnly => 1,
        Model::Turnstile => 32 * log2(n) * log2(n),
    };
    let base = n.max(2) * log2(n) * sketches;
    let factor = match cfg.alg {
        Algorithm::Mlst | Algorithm::Sparsifier | Algorithm::MaxCut => 8 * (k_for_epsilon(cfg.epsilon)? + 1),
        Algorithm::BfsDet => {
            let stored = 4 * n * n.div_ceil(cfg.p.unwrap_or(1).max(1));
            return Ok(base.saturating_mul(8).saturating_add(stored));
        }
        Algorithm::BfsRand | Algorithm::Diameter | Algorithm::Steiner => 64,
        Algorithm::DfsSimple => 8 * (cfg.k.unwrap_or(1) + 2),
        Algorithm::DfsAa => 16 * (cfg.s.unwrap_or(1) + 2),
        Algorithm::CertVc | Algorithm::CertEdge => 8 * (cfg.s.unwrap_or(1) + 1),
    };
    Ok(base.saturating_mul(factor))
}

fn tree_json(t: &RootedTree, extra: Value) -> Value {
    let mut v = json!({ "root": t.root(), "parent": t.parents(), "leaves": t.leaf_count(), "height": t.height() });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn params(cfg: &RunConfig, budget: usize) -> Value {
    json!({
        "source": cfg.gen.clone().unwrap_or_else(|| cfg.stream.as_ref().map(|p| p.display().to_string()).unwrap_or_default()),
        "seed": cfg.seed,
        "turnstile": cfg.turnstile,
        "root": cfg.root,
        "k": cfg.k,
        "s": cfg.s,
        "p": cfg.p,
        "epsilon": cfg.epsilon,
        "confidence": cfg.confidence,
        "terminals": cfg.terminals,
        "strict_budget": cfg.strict_budget,
        "budget": budget,
    })
}

/// Executes a run and returns its artifacts without writing anything.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    if cfg.epsilon.is_nan() || cfg.epsilon <= 0.0 || cfg.confidence.is_nan() || cfg.confidence <= 0.0 {
        return Err(Error::Parameter("--epsilon and --confidence must be positive".into()));
    }
    let stream = load(cfg)?;
    let n = stream.n();
    if cfg.root >= n {
        return Err(Error::Parameter(format!("root {} out of range for n = {n}", cfg.root)));
    }
    let budget = space_budget(cfg, n, stream.model())?;
    let meter = Meter::with_budget(budget, cfg.strict_budget);
    let mut session = StreamSession::with_meter(&stream, meter);
    let seed = cfg.seed;
    let bfs_cfg = |k: usize| BfsConfig { confidence: cfg.confidence, ..BfsConfig::new(k, seed) };
    let mut table = None;
    let result = match cfg.alg {
        Algorithm::Mlst => {
            let t = approx_mlst(&mut session, cfg.epsilon, seed)?;
            tree_json(&t, json!({ "epsilon": cfg.epsilon }))
        }
        Algorithm::Sparsifier => serde_json::to_value(with_retries(seed, 5, |s| build_sparsifier(&mut session, cfg.epsilon, s))?)?,
        Algorithm::MaxCut => serde_json::to_value(connected_max_cut(&mut session, cfg.epsilon, seed)?)?,
        Algorithm::BfsDet => {
            let r = bfs_deterministic(&mut session, cfg.root, need(cfg.p, "p")?)?;
            table = Some(r.table().to_csv());
            tree_json(&r.tree()?, json!({ "dist": r.dist }))
        }
        Algorithm::BfsRand => {
            let k = need(cfg.k, "k")?;
            let (r, stats) = with_retries(seed, 5, |s| bfs_randomized(&mut session, cfg.root, &BfsConfig { seed: s, ..bfs_cfg(k) }))?;
            table = Some(r.table().to_csv());
            tree_json(&r.tree()?, json!({ "dist": r.dist, "h": stats.h, "centers": stats.centers }))
        }
        Algorithm::Diameter => {
            let k = need(cfg.k, "k")?;
            serde_json::to_value(with_retries(seed, 5, |s| diameter_approx(&mut session, &BfsConfig { seed: s, ..bfs_cfg(k) }))?)?
        }
        Algorithm::Steiner => {
            let k = need(cfg.k, "k")?;
            if cfg.terminals.is_empty() {
                return Err(Error::Parameter("--terminals is required for steiner".into()));
            }
            let edges = with_retries(seed, 5, |s| steiner_2approx(&mut session, &cfg.terminals, &BfsConfig { seed: s, ..bfs_cfg(k) }))?;
            json!({ "terminals": cfg.terminals, "cost": edges.len(), "edges": edges })
        }
        Algorithm::DfsSimple => {
            let r = dfs_simple(&mut session, cfg.root, need(cfg.k, "k")?, seed)?;
            tree_json(&r.tree, json!({ "preorder": r.tree.preorder(), "rounds": r.rounds }))
        }
        Algorithm::DfsAa => {
            let r = dfs_aa(&mut session, cfg.root, need(cfg.k, "k")?, need(cfg.s, "s")?, seed)?;
            tree_json(&r.tree, json!({ "preorder": r.tree.preorder(), "levels": r.levels }))
        }
        Algorithm::CertVc | Algorithm::CertEdge => {
            let s = need(cfg.s, "s")?;
            let cert = match cfg.alg {
                Algorithm::CertVc => with_retries(seed, 5, |sd| vc_certificate(&mut session, s, sd))?,
                _ => edge_certificate_insertion(&mut session, s)?,
            };
            let meter = serde_json::to_string_pretty(&session.meter.report(cfg.alg.id(), params(cfg, budget)))?;
            return Ok(RunOutput { result: write_edges(n, &cert.edges), meter, table: None });
        }
    };
    let meter = serde_json::to_string_pretty(&session.meter.report(cfg.alg.id(), params(cfg, budget)))?;
    Ok(RunOutput { result: serde_json::to_string_pretty(&json!({ "algorithm": cfg.alg.id(), "result": result }))?, meter, table })
}

fn suffixed(path: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let out = execute(cfg)?;
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &out.result)?;
            std::fs::write(suffixed(path, ".meter.json"), &out.meter)?;
            if let Some(t) = &out.table {
                std::fs::write(suffixed(path, ".dist.csv"), t)?;
            }
        }
        None => {
            writeln!(stdout, "{}", out.result.trim_end())?;
            writeln!(stdout, "{}", out.meter)?;
        }
    }
    Ok(())
}

fn bench(cfg: &BenchConfig, stdout: &mut dyn Write) -> Result<bool> {
    if cfg.suite.trim().is_empty() {
        return Err(Error::Parameter("empty suite id".into()));
    }
    if cfg.suite != "acceptance" {
        return Err(Error::Parameter(format!("unknown suite '{}'", cfg.suite)));
    }
    if let Some(bad) = cfg.criteria.iter().find(|&&c| !CRITERIA.iter().any(|x| x.0 == c)) {
        return Err(Error::Parameter(format!("no acceptance criterion {bad}")));
    }
    let reports = run_suite(&cfg.criteria)?;
    for r in &reports {
        writeln!(stdout, "{}", r.line())?;
    }
    let json = serde_json::to_string_pretty(&json!({ "suite": cfg.suite, "criteria": reports }))?;
    match &cfg.out {
        Some(path) => std::fs::write(path, json)?,
        None => writeln!(stdout, "{json}")?,
    }
    Ok(reports.iter().all(|r| r.passed))
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit status.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Run(cfg) => run(cfg, stdout).map(|()| true),
        Command::Bench(cfg) => bench(cfg, stdout),
    };
    match outcome {
        Ok(true) => exit::OK,
        Ok(false) => exit::OTHER,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
