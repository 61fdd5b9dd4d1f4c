//! `hovoid` command line. JSON goes to stdout with sorted keys, a short
//! summary to stderr.
//!
//! Exit codes: 0 success, 1 verification false, 2 usage or malformed input,
//! 3 budget exhausted.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hovoid::bounds::{bound_f, kloosterman_count_oracle, np_for, np_table, trace_one_oracle};
use hovoid::geometry::line_through;
use hovoid::gf::{CtxOptions, FieldCtx, Params, DEFAULT_ZECH_THRESHOLD};
use hovoid::group::{set_stabilizer_in_g, DEFAULT_GROUP_CAP};
use hovoid::io::{self, LoadedOvoid, OvoidFile};
use hovoid::ovoid::{
    construct_classical, construct_q8, construct_singer_type, derive, intersection_profile, verify_ovoid,
    ProfileMode,
};
use hovoid::search::{run_search_in, surviving_cases, Checkpoint, SearchOptions};

/// Environment variable capping table memory, in MiB.
const MEMORY_ENV: &str = "HOVOID_MEMORY_BUDGET_MB";
/// Largest orbit an oracle will enumerate.
const ORACLE_CAP: u64 = 1 << 32;

#[derive(Parser)]
#[command(name = "hovoid", version, about = "Ovoids of Hermitian polar spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a known ovoid and write it as JSON.
    Construct(ConstructArgs),
    /// Check that a point set is an ovoid.
    Verify(VerifyArgs),
    /// Intersection sizes of tangent hyperplanes with an ovoid.
    Profile(ProfileArgs),
    /// Derive an ovoid along a line meeting it in q+1 points.
    Derive(DeriveArgs),
    /// Exhaustive search for transitive ovoids.
    Search(SearchArgs),
    #[command(subcommand)]
    Bounds(BoundsCommand),
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Classical,
    Singer,
    #[value(name = "q8-1")]
    Q81,
    #[value(name = "q8-2")]
    Q82,
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    n: u32,
}

#[derive(Args)]
struct ConstructArgs {
    kind: Kind,
    #[command(flatten)]
    field: FieldArgs,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Use the transitivity hint stored in the file, if it checks out.
    #[arg(long)]
    fast_path: bool,
    /// Also compute the stabilizer in G.
    #[arg(long)]
    stabilizer: bool,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Check every singular point.
    #[arg(long, conflicts_with = "sample")]
    all: bool,
    /// Check this many points on each side.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Indices of two ovoid points spanning the line, as `I,J`.
    #[arg(long, value_parser = parse_pair)]
    line: (usize, usize),
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Disable a pruning rule: parity, s-bounds, gcd or all. Repeatable.
    #[arg(long = "no-prune", value_name = "LEMMA")]
    no_prune: Vec<String>,
    /// Also search the Singer subgroups (s = 1).
    #[arg(long)]
    include_s1: bool,
    #[arg(long)]
    workers: Option<usize>,
    /// Seed classes per work unit.
    #[arg(long, default_value_t = 256)]
    chunk: usize,
    /// Resume from this file if it exists; written when the budget runs out.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a table of classes instead of JSON.
    #[arg(long)]
    table: bool,
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Largest dimension n_p not excluded, for primes below pmax.
    Table {
        #[arg(long, default_value_t = 45)]
        pmax: u64,
        #[arg(long)]
        table: bool,
    },
    /// The exact value of F(n, p).
    Check {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
    },
    /// Cases (n, p^d) that survive the parameter restrictions.
    Cases {
        #[arg(long, default_value_t = 45)]
        pmax: u64,
        #[arg(long, default_value_t = 3)]
        dmax: u32,
        #[arg(long)]
        table: bool,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Count z of order dividing q^n+1 with trace 1 to F_{q^2}.
    Kloosterman {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Check that no z in <ω> outside F_{q^2} has trace 1 (n = 3).
    TraceOne {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u32,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected I,J")?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// A finished command: the JSON payload and the exit code.
struct Outcome {
    code: u8,
    payload: Option<Value>,
    text: Option<String>,
}

impl Outcome {
    fn json(payload: Value) -> Self {
        Outcome { code: 0, payload: Some(payload), text: None }
    }

    fn with_code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }
}

fn ctx_options() -> anyhow::Result<CtxOptions> {
    let mut options = CtxOptions::default();
    if let Ok(raw) = std::env::var(MEMORY_ENV) {
        let mb: u64 = raw.trim().parse().with_context(|| format!("{MEMORY_ENV}={raw:?}"))?;
        // Two u64 tables per element.
        options.zech_threshold = DEFAULT_ZECH_THRESHOLD.min(mb.saturating_mul(1 << 20) / 16);
    }
    Ok(options)
}

fn field_ctx(args: &FieldArgs) -> anyhow::Result<FieldCtx> {
    Ok(FieldCtx::with_options(Params::new(args.p, args.d, args.n)?, ctx_options()?)?)
}

fn load(path: &Path) -> anyhow::Result<LoadedOvoid> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: OvoidFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(io::ovoid_from_file_with(&file, ctx_options()?)?)
}

fn write_or_return(out: Option<&Path>, value: Value) -> anyhow::Result<Option<Value>> {
    match out {
        Some(path) => {
            fs::write(path, io::to_sorted_json(&value)?).with_context(|| format!("writing {}", path.display()))?;
            Ok(None)
        }
        None => Ok(Some(value)),
    }
}

fn construct(args: &ConstructArgs) -> anyhow::Result<Outcome> {
    let ctx = field_ctx(&args.field)?;
    let con = match args.kind {
        Kind::Classical => construct_classical(&ctx)?,
        Kind::Singer => construct_singer_type(&ctx)?,
        Kind::Q81 => construct_q8(&ctx, 1)?,
        Kind::Q82 => construct_q8(&ctx, 2)?,
    };
    eprintln!("constructed {} points", con.set.len());
    let file = serde_json::to_value(io::ovoid_to_file(&ctx, &con.set, con.hint.as_ref()))?;
    Ok(Outcome { code: 0, payload: write_or_return(args.out.as_deref(), file)?, text: None })
}

fn verify(args: &VerifyArgs) -> anyhow::Result<Outcome> {
    let loaded = load(&args.input)?;
    let hint = if args.fast_path { loaded.hint.as_ref() } else { None };
    let mut cert = verify_ovoid(&loaded.ctx, &loaded.set, hint)?;
    if args.stabilizer {
        cert.stabilizer_order_in_g = Some(set_stabilizer_in_g(&loaded.ctx, &loaded.set, DEFAULT_GROUP_CAP)?.order);
    }
    match cert.first_failure {
        Some([i, j]) => eprintln!("not an ovoid: points {i} and {j} are perpendicular"),
        None if !cert.valid => eprintln!("not an ovoid: {} points, expected {}", cert.size, cert.expected_size),
        None => eprintln!("valid ovoid of {} points", cert.size),
    }
    let code = if cert.valid { 0 } else { 1 };
    Ok(Outcome::json(serde_json::to_value(&cert)?).with_code(code))
}

fn profile(args: &ProfileArgs) -> anyhow::Result<Outcome> {
    let loaded = load(&args.input)?;
    let mode = match (args.all, args.sample) {
        (true, _) => ProfileMode::All,
        (false, Some(count)) => ProfileMode::Sample { count, seed: args.seed },
        (false, None) => ProfileMode::default_for(&loaded.ctx),
    };
    let report = intersection_profile(&loaded.ctx, &loaded.set, mode)?;
    eprintln!(
        "{} members, {} outside points checked, {} violations",
        report.members_checked,
        report.outside_checked,
        report.violations.len()
    );
    let code = if report.ok() { 0 } else { 1 };
    Ok(Outcome::json(io::profile_json(&loaded.ctx, &report)).with_code(code))
}

fn derive_cmd(args: &DeriveArgs) -> anyhow::Result<Outcome> {
    let loaded = load(&args.input)?;
    let points = loaded.set.points();
    let (i, j) = args.line;
    let get = |k: usize| points.get(k).with_context(|| format!("point index {k} out of range ({})", points.len()));
    let line = line_through(&loaded.ctx, get(i)?, get(j)?)?;
    let derived = derive(&loaded.ctx, &loaded.set, &line)?;
    eprintln!("derived ovoid of {} points", derived.len());
    let file = serde_json::to_value(io::ovoid_to_file(&loaded.ctx, &derived, None))?;
    Ok(Outcome { code: 0, payload: write_or_return(args.out.as_deref(), file)?, text: None })
}

fn search(args: &SearchArgs) -> anyhow::Result<Outcome> {
    let ctx = field_ctx(&args.field)?;
    let mut options = SearchOptions::new(ctx.params());
    for name in &args.no_prune {
        options.pruning.disable(name)?;
    }
    options.include_s1 = args.include_s1;
    if let Some(w) = args.workers {
        if w == 0 {
            bail!(hovoid::Error::InvalidParams("--workers must be positive".into()));
        }
        options.workers = w;
    }
    if args.chunk == 0 {
        bail!(hovoid::Error::InvalidParams("--chunk must be positive".into()));
    }
    options.chunk_size = args.chunk;
    options.time_budget = args.time_budget.map(Duration::from_secs_f64);
    options.ctx_options = ctx_options()?;
    if let Some(path) = args.checkpoint.as_deref().filter(|p| p.exists()) {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cp: Checkpoint = serde_json::from_str(&text)
            .map_err(hovoid::Error::from)
            .with_context(|| format!("parsing {}", path.display()))?;
        eprintln!("resuming: {} of {} units done", cp.completed.len(), cp.units_total);
        options.resume = Some(cp);
    }
    let outcome = run_search_in(&ctx, &options)?;
    if !outcome.complete {
        let cp = io::to_sorted_json(&outcome.checkpoint)?;
        match args.checkpoint.as_deref() {
            Some(path) => {
                fs::write(path, cp).with_context(|| format!("writing {}", path.display()))?;
                eprintln!(
                    "time budget exhausted after {} of {} units; checkpoint written to {}",
                    outcome.checkpoint.completed.len(),
                    outcome.checkpoint.units_total,
                    path.display()
                );
            }
            None => eprintln!("time budget exhausted; pass --checkpoint to keep progress"),
        }
        let payload = json!({ "complete": false, "checkpoint": serde_json::to_value(&outcome.checkpoint)? });
        return Ok(Outcome::json(payload).with_code(3));
    }
    let report = &outcome.report;
    eprintln!(
        "{} subgroups, {} seed classes, {} full orbits, {} hits, {} classes in {:.2?}",
        report.specs.len(),
        report.seed_classes,
        report.full_orbits,
        report.hits,
        report.classes.len(),
        report.elapsed
    );
    let value = io::search_report_json(&ctx, report);
    let text = args.table.then(|| {
        let mut s = format!("{:>5} {:>12} {:>12} {:>10} {:>12}\n", "class", "|Stab_G|", "|Stab|", "witness", "seed");
        for (idx, c) in report.representatives().enumerate() {
            let (spec, seed) = c.witness;
            s += &format!(
                "{:>5} {:>12} {:>12} {:>10} {:>12}\n",
                idx,
                c.stabilizer_order_in_g,
                c.full_stabilizer_order.map_or("-".into(), |o| o.to_string()),
                format!("({},{},{})", spec.s, spec.k, spec.j),
                seed.encoding()
            );
        }
        s
    });
    if args.table {
        if let Some(path) = args.out.as_deref() {
            fs::write(path, io::to_sorted_json(&value)?).with_context(|| format!("writing {}", path.display()))?;
        }
        return Ok(Outcome { code: 0, payload: None, text });
    }
    Ok(Outcome { code: 0, payload: write_or_return(args.out.as_deref(), value)?, text: None })
}

fn bounds(cmd: &BoundsCommand) -> anyhow::Result<Outcome> {
    match cmd {
        BoundsCommand::Table { pmax, table } => {
            let reports = np_table(*pmax)?;
            let summary: Vec<Value> = reports.iter().map(|r| json!({ "p": r.p, "n_p": r.n_p })).collect();
            eprintln!("{} primes below {pmax}", reports.len());
            if *table {
                let mut s = String::from("   p  n_p\n");
                for r in &reports {
                    s += &format!("{:>4} {:>4}\n", r.p, r.n_p);
                }
                return Ok(Outcome { code: 0, payload: None, text: Some(s) });
            }
            Ok(Outcome::json(json!({ "pmax": pmax, "n_p": summary, "reports": reports })))
        }
        BoundsCommand::Check { n, p } => {
            let f = bound_f(*n, *p)?;
            let at_least_one = f.numer() >= f.denom();
            let n_p = np_for(*p)?.n_p;
            eprintln!("F({n}, {p}) = {f} ({})", if at_least_one { ">= 1" } else { "< 1" });
            Ok(Outcome::json(json!({
                "n": n,
                "p": p,
                "value": f.to_string(),
                "at_least_one": at_least_one,
                "n_p": n_p,
            })))
        }
        BoundsCommand::Cases { pmax, dmax, table } => {
            let cases = surviving_cases(*pmax, *dmax)?;
            eprintln!("{} surviving cases", cases.len());
            if *table {
                let mut s = format!("{:>3} {:>4} {:>3} {:>4}  m\n", "n", "p", "d", "s");
                for c in &cases {
                    let ms: Vec<String> = c.m.iter().map(|m| m.to_string()).collect();
                    s += &format!("{:>3} {:>4} {:>3} {:>4}  {}\n", c.n, c.p, c.d, c.s, ms.join(","));
                }
                return Ok(Outcome { code: 0, payload: None, text: Some(s) });
            }
            Ok(Outcome::json(json!({ "pmax": pmax, "dmax": dmax, "cases": cases })))
        }
    }
}

fn oracle(cmd: &OracleCommand) -> anyhow::Result<Outcome> {
    match cmd {
        OracleCommand::Kloosterman { field } => {
            let ctx = field_ctx(field)?;
            let report = kloosterman_count_oracle(&ctx, ORACLE_CAP)?;
            eprintln!("q = {}, n = {}: {} solutions", report.q, report.n, report.count);
            let code = if report.ok { 0 } else { 1 };
            Ok(Outcome::json(serde_json::to_value(&report)?).with_code(code))
        }
        OracleCommand::TraceOne { p, d } => {
            let ctx = FieldCtx::with_options(Params::new(*p, *d, 3)?, ctx_options()?)?;
            let holds = trace_one_oracle(&ctx, ORACLE_CAP)?;
            eprintln!("q = {}: {}", ctx.q(), if holds { "no trace-one elements" } else { "trace-one element found" });
            let code = if holds { 0 } else { 1 };
            Ok(Outcome::json(json!({ "p": p, "d": d, "q": ctx.q(), "holds": holds })).with_code(code))
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a),
        Command::Profile(a) => profile(a),
        Command::Derive(a) => derive_cmd(a),
        Command::Search(a) => search(a),
        Command::Bounds(c) => bounds(c),
        Command::Oracle(c) => oracle(c),
    }
}

fn error_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<hovoid::Error>() {
        Some(hovoid::Error::Budget(_)) => 3,
        Some(hovoid::Error::Consistency(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Some(text) = outcome.text {
                print!("{text}");
            } else if let Some(payload) = outcome.payload {
                match io::to_sorted_json(&payload) {
                    Ok(s) => print!("{s}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
            ExitCode::from(outcome.code)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(error_code(&err))
        }
    }
}
