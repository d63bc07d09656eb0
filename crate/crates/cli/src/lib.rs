//! Command-line front end: file ingestion and subcommand dispatch.

pub mod error;
pub mod files;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nestedcast::classify::{capacity_report, ClassifyError, ClassifyOptions};
use nestedcast::config::DEFAULT_SEED;
use nestedcast::fme::{verify_split_elimination, FmeError, LemmaReport};
use nestedcast::optimize::{chain_region, to_csv, union_region, OptimizeError};
use nestedcast::oracle::{split_rate_oracle, OracleError};
use nestedcast::ordering::ordering_graph;
use nestedcast::regions::{RegionError, RegionPolygon, SchemeId};
use nestedcast::{BroadcastSpec, SearchConfig};

pub use error::*;
use files::{ChainFile, ChannelFile};

#[derive(Debug, Parser)]
#[command(name = "nestedcast", version, about = "Rate regions and capacity classes for broadcast channels with nested multicast messages")]
pub struct Cli {
    /// Seed for every randomized search.
    #[arg(long, global = true, env = "NESTEDCAST_SEED")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise ordering table and Hasse diagram of the receivers.
    Orders(OrdersArgs),
    /// Region of one scheme for a fixed chain, or its union over chains.
    Region(RegionArgs),
    /// Capacity-class report.
    Classify(ClassifyArgs),
    /// Randomized exact check of the split-rate elimination lemmas.
    VerifyFme(VerifyFmeArgs),
    /// Grid comparison of the closed-form region with the split-rate system.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Use reduced search budgets.
    #[arg(long)]
    pub fast: bool,
}

#[derive(Debug, Args)]
pub struct OrdersArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["chain", "union"])))]
pub struct RegionArgs {
    pub file: PathBuf,
    /// Scheme name such as `sup`, `thm2`, `cor1:3` or `thm3:3:2:1`.
    #[arg(long)]
    pub scheme: String,
    /// Chain file with the auxiliary laws, top level first.
    #[arg(long)]
    pub chain: Option<PathBuf>,
    /// Search the union over chains instead of a single chain.
    #[arg(long)]
    pub union: bool,
    /// Also write the region's vertices as CSV.
    #[arg(long)]
    pub vertex_csv: Option<PathBuf>,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    pub file: PathBuf,
    /// Accept only degradedness as ordering evidence.
    #[arg(long)]
    pub strict: bool,
    /// Skip the union search for the region.
    #[arg(long)]
    pub no_region: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Args)]
pub struct VerifyFmeArgs {
    /// Number of receivers.
    #[arg(long = "K")]
    pub k: usize,
    /// Number of private receivers.
    #[arg(long = "L")]
    pub l: usize,
    /// Last eliminated split index; all of `L+1..K-1` when omitted.
    #[arg(long = "l")]
    pub split: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub chain: PathBuf,
    /// Grid step in bits.
    #[arg(long, default_value_t = 0.005)]
    pub grid: f64,
}

/// Text to print and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: EXIT_OK }
    }
}

fn region_error(e: RegionError) -> CliError {
    match e {
        RegionError::LevelMismatch { .. } | RegionError::InvalidScheme(_) | RegionError::Chain(_) => {
            CliError::Scheme(e.to_string())
        }
        other => CliError::Failed(other.to_string()),
    }
}

fn optimize_error(e: OptimizeError) -> CliError {
    match e {
        OptimizeError::Region(r) => region_error(r),
        OptimizeError::Config(c) => CliError::Argument(c.to_string()),
    }
}

fn classify_error(e: ClassifyError) -> CliError {
    match e {
        ClassifyError::Optimize(o) => optimize_error(o),
        other => CliError::Failed(other.to_string()),
    }
}

struct Loaded {
    bc: BroadcastSpec,
    cfg: SearchConfig,
}

fn load(path: &PathBuf, seed: Option<u64>, budget: Option<&BudgetArgs>) -> Result<Loaded, CliError> {
    let file = ChannelFile::load(path)?;
    let bc = file.spec().map_err(|e| CliError::Argument(e.to_string()))?;
    let mut cfg = file.search.clone().unwrap_or_default();
    if budget.is_some_and(|b| b.fast) {
        let fast = SearchConfig::fast(cfg.seed);
        cfg.pairs = fast.pairs;
        cfg.lines = fast.lines;
        cfg.multistarts = fast.multistarts;
        cfg.iterations = fast.iterations;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(Loaded { bc, cfg })
}

fn header(bc: &BroadcastSpec, cfg: &SearchConfig) -> String {
    let names: Vec<String> = (0..bc.k())
        .map(|i| {
            let tag = if i < bc.l() { "private" } else { "common" };
            format!("{} ({tag})", bc.name(i))
        })
        .collect();
    format!("receivers: {}\nseed: {}\n", names.join(", "), cfg.seed)
}

fn cmd_orders(args: &OrdersArgs, seed: Option<u64>) -> Result<Outcome, CliError> {
    let Loaded { bc, cfg } = load(&args.file, seed, Some(&args.budget))?;
    let graph = ordering_graph(&bc, &cfg).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut out = header(&bc, &cfg);
    out.push_str(&graph.table());
    out.push_str("hasse edges:\n");
    out.push_str(&graph.edge_lines());
    if graph.has_sampled() {
        out.push_str("note: some verdicts rest on sampling\n");
    }
    out.push_str(&graph.to_dot());
    Ok(Outcome::ok(out))
}

fn vertex_csv(p: &RegionPolygon) -> String {
    let mut s = String::from("R0,R1\n");
    for v in &p.vertices {
        let _ = writeln!(s, "{:.9},{:.9}", v[0], v[1]);
    }
    s
}

fn cmd_region(args: &RegionArgs, seed: Option<u64>) -> Result<Outcome, CliError> {
    let Loaded { bc, cfg } = load(&args.file, seed, Some(&args.budget))?;
    let scheme: SchemeId = args.scheme.parse().map_err(region_error)?;
    scheme.validate(&bc).map_err(region_error)?;
    let mut out = header(&bc, &cfg);
    let _ = writeln!(out, "scheme: {scheme}");
    let shown = if let Some(path) = &args.chain {
        let chain = ChainFile::load(path)?
            .chain()
            .map_err(|e| CliError::Argument(e.to_string()))?;
        let poly = chain_region(&bc, scheme, &chain).map_err(region_error)?;
        out.push_str(&poly.to_record());
        poly
    } else {
        let u = union_region(&bc, scheme, &cfg).map_err(optimize_error)?;
        let cards: Vec<String> = u.cardinalities.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "cardinalities: {}", cards.join(","));
        out.push_str("inner:\n");
        out.push_str(&u.inner.to_record());
        out.push_str("outer:\n");
        out.push_str(&u.outer.to_record());
        let _ = writeln!(out, "gap: {:.9}", u.gap);
        out.push_str(&to_csv(&u.points));
        u.inner
    };
    if let Some(path) = &args.vertex_csv {
        std::fs::write(path, vertex_csv(&shown)).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(Outcome::ok(out))
}

fn cmd_classify(args: &ClassifyArgs, seed: Option<u64>) -> Result<Outcome, CliError> {
    let Loaded { bc, cfg } = load(&args.file, seed, Some(&args.budget))?;
    let opts = ClassifyOptions {
        strict: args.strict,
        skip_region: args.no_region,
    };
    let report = capacity_report(&bc, &cfg, &opts).map_err(classify_error)?;
    let mut out = header(&bc, &cfg);
    out.push_str(&report.to_text());
    Ok(Outcome {
        stdout: out,
        code: if report.capacity_claim { EXIT_OK } else { EXIT_NO_CLAIM },
    })
}

fn fme_error(e: FmeError) -> CliError {
    match e {
        FmeError::ParameterRange(m) => CliError::Argument(m),
        other => CliError::Fme(other.to_string()),
    }
}

fn cmd_verify_fme(args: &VerifyFmeArgs, seed: Option<u64>) -> Result<Outcome, CliError> {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let start = Instant::now();
    let reports = verify_split_elimination(args.k, args.l, args.split, args.trials, seed).map_err(fme_error)?;
    eprintln!("elapsed: {:.2} s", start.elapsed().as_secs_f64());
    let mut out = format!("K={} L={} seed={seed}\n", args.k, args.l);
    for r in &reports {
        out.push_str(&r.to_string());
    }
    let ok = reports.iter().all(LemmaReport::all_passed);
    out.push_str(if ok { "result: pass\n" } else { "result: FAIL\n" });
    Ok(Outcome {
        stdout: out,
        code: if ok { EXIT_OK } else { EXIT_FME },
    })
}

fn cmd_oracle(args: &OracleArgs, seed: Option<u64>) -> Result<Outcome, CliError> {
    let Loaded { bc, cfg } = load(&args.file, seed, None)?;
    if !(args.grid > 0.0 && args.grid <= 0.1) {
        return Err(CliError::Argument(format!(
            "grid step must lie in (0, 0.1], got {}",
            args.grid
        )));
    }
    let chain = ChainFile::load(&args.chain)?
        .chain()
        .map_err(|e| CliError::Argument(e.to_string()))?;
    let report = split_rate_oracle(&bc, &chain, args.grid).map_err(|e| match e {
        OracleError::Region(r) => region_error(r),
        other => CliError::Failed(other.to_string()),
    })?;
    let mut out = header(&bc, &cfg);
    out.push_str(&report.to_text());
    Ok(Outcome {
        stdout: out,
        code: if report.passed() { EXIT_OK } else { EXIT_FAILURE },
    })
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Orders(a) => cmd_orders(a, cli.seed),
        Command::Region(a) => cmd_region(a, cli.seed),
        Command::Classify(a) => cmd_classify(a, cli.seed),
        Command::VerifyFme(a) => cmd_verify_fme(a, cli.seed),
        Command::Oracle(a) => cmd_oracle(a, cli.seed),
    }
}
