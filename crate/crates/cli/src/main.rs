use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;
use serde_json::json;

use hasse_core::cache::{analyze_cached, Cache};
use hasse_core::group::{catalog_listing, parse_group_spec, GroupSpec, DEFAULT_SUBGROUP_CAP, FAMILIES};
use hasse_core::input::{parse_group, parse_subgroup, FamilySpec};
use hasse_core::lattice::phnp_lattice;
use hasse_core::report::AnalyzeOptions;
use hasse_core::scan::{scan, Execution, ScanMode, ScanOptions, ScanSummary};
use hasse_core::Error;

const EXIT_FOUND: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

/// Hasse norm principle obstructions for finite Galois groups.
#[derive(Parser)]
#[command(name = "hasse", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one group with a list of stabilizers.
    Analyze(AnalyzeArgs),
    /// Scan catalog groups over pairs of normal stabilizers.
    Scan(ScanArgs),
    /// Shorthand for `scan --mode lattice`.
    ScanLattice(ScanCommon),
    /// Shorthand for `scan --mode criteria`.
    ScanCriteria(ScanCommon),
    /// List catalog groups.
    Catalog(CatalogArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Catalog spec, inline JSON, or @file.
    #[arg(long, short)]
    group: String,
    /// Stabilizer subgroup; repeat once per field.
    #[arg(long = "stabilizer", short, required = true)]
    stabilizers: Vec<String>,
    /// cyclic | all-cyclic | explicit:<json or @file>
    #[arg(long, default_value = "cyclic")]
    family: String,
    #[arg(long)]
    json: bool,
    /// Skip the lattice side; character criteria and the gate only.
    #[arg(long)]
    criteria_only: bool,
    /// Largest group order for direct cohomology of the lattices.
    #[arg(long, default_value_t = hasse_core::cohomology::DEFAULT_MAX_ORDER)]
    max_order: usize,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Record per-stage timings (bypasses the cache).
    #[arg(long)]
    timings: bool,
    /// Write the lattices as JSON to this path.
    #[arg(long)]
    dump_lattice: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Lattice,
    Criteria,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum, default_value = "criteria")]
    mode: Mode,
    #[command(flatten)]
    common: ScanCommon,
}

#[derive(Args)]
struct ScanCommon {
    /// Catalog families to include (comma separated).
    #[arg(long, value_delimiter = ',')]
    groups: Vec<String>,
    /// Individual catalog specs; repeatable.
    #[arg(long = "group")]
    specs: Vec<String>,
    /// Order range `A..B` (inclusive) or a single order.
    #[arg(long, default_value = "1..16")]
    orders: String,
    #[arg(long, default_value_t = hasse_core::cohomology::DEFAULT_MAX_ORDER)]
    max_order: usize,
    #[arg(long, default_value_t = DEFAULT_SUBGROUP_CAP)]
    subgroup_cap: usize,
    /// cyclic | all-cyclic
    #[arg(long, default_value = "cyclic")]
    family: String,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
    /// Skip pairs whose indices are both prime powers.
    #[arg(long)]
    prime_power_filter: bool,
    #[arg(long)]
    json: bool,
    /// Exit with status 1 when anything is found.
    #[arg(long)]
    fail_on_found: bool,
}

#[derive(Args)]
struct CatalogArgs {
    #[arg(long, default_value = "1..16")]
    orders: String,
    #[arg(long, value_delimiter = ',')]
    groups: Vec<String>,
    #[arg(long)]
    json: bool,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::OrderCapExceeded { .. } => EXIT_CAP,
            Error::IndivisibleCounts { .. } | Error::QuotientNotFree(_) | Error::NotStable | Error::Linalg(_) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

fn parse_orders(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || input_error(format!("bad order range {s:?}; expected A..B or N"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().trim_start_matches('=').parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn check_families(names: &[String]) -> Result<(), Failure> {
    match names.iter().find(|f| !FAMILIES.contains(&f.as_str())) {
        Some(f) => Err(input_error(format!("unknown family {f:?}; known: {}", FAMILIES.join(", ")))),
        None => Ok(()),
    }
}

fn selection(orders: &str, families: &[String], specs: &[String]) -> Result<Vec<GroupSpec>, Failure> {
    check_families(families)?;
    let mut out: Vec<GroupSpec> = specs.iter().map(|s| parse_group_spec(s)).collect::<Result<_, _>>()?;
    if specs.is_empty() || !families.is_empty() {
        let (lo, hi) = parse_orders(orders)?;
        out.extend(
            catalog_listing(lo, hi)
                .into_iter()
                .filter(|e| families.is_empty() || families.iter().any(|f| f == e.family))
                .map(|e| e.spec),
        );
    }
    out.sort_by_key(|s| (s.order(), s.to_string()));
    out.dedup();
    Ok(out)
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<u8, Failure> {
    let group = parse_group(&a.group)?;
    let stabs = a.stabilizers.iter().map(|s| parse_subgroup(&group.group, s)).collect::<Result<Vec<_>, _>>()?;
    let family = FamilySpec::parse(&a.family)?;
    let opts = AnalyzeOptions { criteria_only: a.criteria_only, max_order: a.max_order, gate_max_order: None, timings: a.timings };
    if let Some(path) = &a.dump_lattice {
        let phnp = phnp_lattice(&group.group, &stabs)?;
        let dump = json!({
            "phnp": phnp.lattice.to_json(),
            "hnp_summands": phnp.hnp.summands.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
        });
        let text = serde_json::to_string_pretty(&dump).expect("lattice JSON serializes");
        fs::write(path, text).map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))?;
    }
    let cache = a.cache_dir.map(Cache::new);
    let (report, text, _) = analyze_cached(cache.as_ref(), &group, &stabs, &family, &opts)?;
    if a.json {
        println!("{text}");
    } else {
        print!("{}", report.to_text());
    }
    Ok(0)
}

fn print_scan(summary: &ScanSummary, as_json: bool) {
    if as_json {
        println!("{}", serde_json::to_string_pretty(summary).expect("scan summary serializes"));
        return;
    }
    println!("{} groups, {} pairs, {} findings", summary.groups, summary.pairs, summary.findings.len());
    for s in &summary.skipped {
        println!("skipped {}: {}", s.group, s.reason);
    }
    for f in &summary.findings {
        let kind = serde_json::to_value(f.kind).expect("kind serializes");
        println!("FOUND {} {} {} {}", kind.as_str().unwrap_or("?"), f.group, f.stabilizers.join(" "), f.evidence);
    }
}

fn cmd_scan(mode: ScanMode, c: ScanCommon) -> Result<u8, Failure> {
    let family = FamilySpec::parse(&c.family)?;
    let groups = selection(&c.orders, &c.groups, &c.specs)?;
    let execution = match c.jobs {
        Some(0) => return Err(input_error("--jobs must be at least 1")),
        Some(1) => Execution::Sequential,
        jobs => Execution::Parallel { jobs },
    };
    let opts = ScanOptions {
        mode,
        family,
        max_order: c.max_order,
        prime_power_filter: c.prime_power_filter,
        subgroup_cap: c.subgroup_cap,
        execution,
    };
    let summary = scan(&groups, &opts)?;
    print_scan(&summary, c.json);
    Ok(if c.fail_on_found && !summary.findings.is_empty() { EXIT_FOUND } else { 0 })
}

fn cmd_catalog(a: CatalogArgs) -> Result<u8, Failure> {
    let specs = selection(&a.orders, &a.groups, &[])?;
    let mut rows = Vec::new();
    for spec in specs {
        let g = spec.build()?;
        let gens: Vec<String> = g.generators().into_iter().map(|x| g.label(x).to_string()).collect();
        rows.push(json!({ "spec": spec.to_string(), "family": spec.family(), "order": spec.order(), "generators": gens }));
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("catalog serializes"));
    } else {
        for r in &rows {
            let gens: Vec<&str> = r["generators"].as_array().into_iter().flatten().filter_map(|v| v.as_str()).collect();
            println!("{:<44} {:<11} {:>4}  {}", r["spec"].as_str().unwrap_or(""), r["family"].as_str().unwrap_or(""), r["order"], gens.join(", "));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Scan(s) => {
            let mode = match s.mode {
                Mode::Lattice => ScanMode::Lattice,
                Mode::Criteria => ScanMode::Criteria,
            };
            cmd_scan(mode, s.common)
        }
        Command::ScanLattice(c) => cmd_scan(ScanMode::Lattice, c),
        Command::ScanCriteria(c) => cmd_scan(ScanMode::Criteria, c),
        Command::Catalog(a) => cmd_catalog(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if f.code == EXIT_INTERNAL {
                warn!("internal consistency failure; please report the input");
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
