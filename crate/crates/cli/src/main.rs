//! `amin-rel`: validate AMIN files, compute reliabilities, run the
//! semi-complete benchmark and generate instances.
//!
//! Exit codes: 0 ok, 1 validation or engine-agreement failure, 2 input error,
//! 3 resource cap (UGFM term cap, oracle budget).

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amin_core::bat::{self, BatCounters};
use amin_core::model::{
    read_network_file, validate, AminNetwork, FileError, NetworkFile, MAX_OUT_DEGREE,
};
use amin_core::oracle::{self, OracleError, DEFAULT_BUDGET};
use amin_core::ugfm::{self, UgfmError, DEFAULT_TERM_CAP};
use amin_core::workbench::{
    gen_random_amin, gen_semi_complete, run_bench, BenchConfig, EngineSet, RandomAminConfig,
};
use amin_core::{NodeSubset, StateDistribution};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

const AGREEMENT_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "amin-rel",
    version,
    about = "Exact reliability of acyclic multistate information networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a network file; prints one line per violation.
    Validate { path: PathBuf },
    /// Compute the reliability of a network file.
    Rel {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Bat)]
        engine: Engine,
        /// Replace the file's targets, e.g. `--targets 4,5`.
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<usize>>,
        /// UGFM limit on stored sub-vectors.
        #[arg(long, default_value_t = DEFAULT_TERM_CAP)]
        cap: u64,
        /// Oracle limit on enumerated cases.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[arg(long, value_enum, default_value_t = RelFormat::Text)]
        format: RelFormat,
    },
    /// Benchmark semi-complete networks over an inclusive size range, e.g. `5..7`.
    Bench {
        #[arg(value_parser = parse_range)]
        range: RangeInclusive<usize>,
        #[arg(long, value_enum, default_value_t = BenchEngine::All)]
        engine: BenchEngine,
        #[arg(long, default_value_t = DEFAULT_TERM_CAP)]
        cap: u64,
        #[arg(long, value_enum, default_value_t = BenchFormat::Text)]
        format: BenchFormat,
        /// Allow sizes of 8 and above.
        #[arg(long)]
        long: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a network file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Every arc i<j, target n, uniform probabilities.
    Semi {
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Seeded random DAG with target n.
    Random {
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        arc_prob: f64,
        /// Draw state probabilities from a flat Dirichlet instead of uniform.
        #[arg(long)]
        dirichlet: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Bat,
    Dfs,
    Ugfm,
    Oracle,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchEngine {
    Bat,
    Ugfm,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchFormat {
    Text,
    Json,
    Csv,
}

/// A failed command: the message goes to stderr, the code becomes the exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure::new(2, message)
    }
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| format!("expected a size or a range like 5..7, got {s:?}"))
    };
    match s.split_once("..") {
        Some((a, b)) => Ok(parse(a)?..=parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = parse(s)?;
            Ok(n..=n)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Rel {
            path,
            engine,
            targets,
            cap,
            budget,
            format,
        } => cmd_rel(&path, engine, targets.as_deref(), cap, budget, format),
        Command::Bench {
            range,
            engine,
            cap,
            format,
            long,
            output,
        } => cmd_bench(range, engine, cap, format, long, output.as_deref()),
        Command::Gen { kind } => cmd_gen(kind),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("{}", f.message.trim_end());
            }
            ExitCode::from(f.code)
        }
    }
}

fn cmd_validate(path: &Path) -> Result<(), Failure> {
    let (network, dist) = match read_network_file(path) {
        Ok(pair) => pair,
        // the file parsed but describes something that cannot be represented
        Err(e @ (FileError::Model(_) | FileError::UnknownMask { .. })) => {
            println!("{e}");
            return Err(Failure::new(1, ""));
        }
        Err(e) => return Err(Failure::input(e.to_string())),
    };
    let violations = validate(&network, &dist);
    for v in &violations {
        println!("{v}");
    }
    if violations.is_empty() {
        println!(
            "ok: {} nodes, {} arcs",
            network.node_count(),
            network.arc_count()
        );
        Ok(())
    } else {
        Err(Failure::new(1, ""))
    }
}

fn load(
    path: &Path,
    targets: Option<&[usize]>,
) -> Result<(AminNetwork, StateDistribution), Failure> {
    let (mut network, dist) = read_network_file(path).map_err(|e| Failure::input(e.to_string()))?;
    if let Some(t) = targets {
        network = network
            .with_targets(t)
            .map_err(|e| Failure::input(e.to_string()))?;
    }
    let violations = validate(&network, &dist);
    if !violations.is_empty() {
        let mut msg = format!("{} is not a valid network:\n", path.display());
        for v in violations {
            let _ = writeln!(msg, "  {v}");
        }
        return Err(Failure::input(msg));
    }
    Ok((network, dist))
}

#[derive(Serialize)]
struct EngineReport {
    engine: &'static str,
    reliability: f64,
    feasible: Option<u64>,
    visited: Option<u64>,
    generated: Option<u64>,
    elapsed_s: f64,
}

#[derive(Serialize)]
struct Bucket {
    targets: Vec<usize>,
    probability: f64,
}

#[derive(Serialize)]
struct Skipped {
    engine: &'static str,
    reason: String,
}

#[derive(Serialize)]
struct RelReport {
    targets: Vec<usize>,
    engines: Vec<EngineReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    skipped: Vec<Skipped>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_delta: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    buckets: Vec<Bucket>,
}

fn from_counters(engine: &'static str, reliability: f64, c: &BatCounters) -> EngineReport {
    EngineReport {
        engine,
        reliability,
        feasible: Some(c.feasible),
        visited: Some(c.visited),
        generated: None,
        elapsed_s: c.elapsed_secs(),
    }
}

fn ugfm_failure(e: UgfmError) -> Failure {
    match e {
        UgfmError::TermCapExceeded { .. } => Failure::new(3, format!("ugfm: {e}")),
        other => Failure::input(format!("ugfm: {other}")),
    }
}

fn oracle_failure(e: OracleError) -> Failure {
    Failure::new(3, format!("oracle: {e}"))
}

fn run_engine(
    engine: Engine,
    network: &AminNetwork,
    dist: &StateDistribution,
    cap: u64,
    budget: u128,
) -> Result<EngineReport, Failure> {
    let required = network.targets();
    match engine {
        Engine::Bat => {
            let r = bat::reliability_to_targets(network, dist, required, bat::threads_from_env());
            Ok(from_counters("bat", r.reliability, &r.counters))
        }
        Engine::Dfs => {
            let r = bat::reliability_frontier(network, dist, required);
            Ok(from_counters("dfs", r.reliability, &r.counters))
        }
        Engine::Ugfm => {
            let out = ugfm::reliability_ugfm(network, dist, cap).map_err(ugfm_failure)?;
            Ok(EngineReport {
                engine: "ugfm",
                reliability: out.reliability(required),
                feasible: Some(out.feasible_count(required)),
                visited: None,
                generated: Some(out.stats.generated_count),
                elapsed_s: out.stats.elapsed.as_secs_f64(),
            })
        }
        Engine::Oracle => {
            let start = std::time::Instant::now();
            let r = oracle::brute_force_reliability(network, dist, required, budget)
                .map_err(oracle_failure)?;
            let feasible = oracle::brute_force_feasible_count(network, required, budget)
                .map_err(oracle_failure)?;
            Ok(EngineReport {
                engine: "oracle",
                reliability: r,
                feasible: Some(feasible),
                visited: None,
                generated: None,
                elapsed_s: start.elapsed().as_secs_f64(),
            })
        }
        Engine::All => unreachable!("expanded by the caller"),
    }
}

fn cmd_rel(
    path: &Path,
    engine: Engine,
    targets: Option<&[usize]>,
    cap: u64,
    budget: u128,
    format: RelFormat,
) -> Result<(), Failure> {
    let (network, dist) = load(path, targets)?;
    let engines = match engine {
        Engine::All => vec![Engine::Bat, Engine::Dfs, Engine::Ugfm, Engine::Oracle],
        one => vec![one],
    };
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for e in engines {
        match run_engine(e, &network, &dist, cap, budget) {
            Ok(r) => reports.push(r),
            // `all` compares what can run; UGFM only handles sink targets
            Err(f) if engine == Engine::All && e == Engine::Ugfm && f.code == 2 => {
                skipped.push(Skipped {
                    engine: "ugfm",
                    reason: f.message.trim_start_matches("ugfm: ").to_string(),
                })
            }
            Err(f) => return Err(f),
        }
    }

    let required = network.targets();
    let buckets = if required.len() > 1 {
        let table = if engine == Engine::Ugfm {
            ugfm::reliability_ugfm(&network, &dist, cap)
                .map_err(ugfm_failure)?
                .buckets(required)
        } else {
            bat::reliability_by_target_subset(&network, &dist).buckets
        };
        table
            .into_iter()
            .map(|(tau, p)| Bucket {
                targets: tau.iter().collect(),
                probability: p,
            })
            .collect()
    } else {
        Vec::new()
    };

    let max_delta = (engine == Engine::All).then(|| {
        let rs: Vec<f64> = reports.iter().map(|r| r.reliability).collect();
        let hi = rs.iter().copied().fold(f64::MIN, f64::max);
        let lo = rs.iter().copied().fold(f64::MAX, f64::min);
        hi - lo
    });

    let report = RelReport {
        targets: required.iter().collect(),
        engines: reports,
        skipped,
        max_delta,
        buckets,
    };
    match format {
        RelFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
        RelFormat::Text => print!("{}", rel_text(&report)),
    }

    match max_delta {
        Some(d) if d > AGREEMENT_TOL => Err(Failure::new(
            1,
            format!("engines disagree: max delta {d:e} > {AGREEMENT_TOL:e}"),
        )),
        _ => Ok(()),
    }
}

fn subset_text(nodes: &[usize]) -> String {
    NodeSubset::from_nodes(nodes.iter().copied()).to_string()
}

fn rel_text(report: &RelReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "targets = {}", subset_text(&report.targets));
    for e in &report.engines {
        if report.engines.len() > 1 {
            let _ = writeln!(out, "[{}]", e.engine);
        }
        let _ = writeln!(out, "R = {:.6}", e.reliability);
        if let Some(f) = e.feasible {
            let _ = writeln!(out, "feasible = {f}");
        }
        if let Some(v) = e.visited {
            let _ = writeln!(out, "visited = {v}");
        }
        if let Some(g) = e.generated {
            let _ = writeln!(out, "generated = {g}");
        }
        let _ = writeln!(out, "elapsed = {:.6} s", e.elapsed_s);
    }
    for s in &report.skipped {
        let _ = writeln!(out, "[{}] skipped: {}", s.engine, s.reason);
    }
    if let Some(d) = report.max_delta {
        let _ = writeln!(out, "max delta = {d:.3e}");
    }
    if !report.buckets.is_empty() {
        let _ = writeln!(out, "reached targets:");
        for b in &report.buckets {
            let _ = writeln!(
                out,
                "  {:<12} {:.6}",
                subset_text(&b.targets),
                b.probability
            );
        }
    }
    out
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_bench(
    sizes: RangeInclusive<usize>,
    engine: BenchEngine,
    cap: u64,
    format: BenchFormat,
    long: bool,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let engines = match engine {
        BenchEngine::Bat => EngineSet {
            bat: true,
            ugfm: false,
        },
        BenchEngine::Ugfm => EngineSet {
            bat: false,
            ugfm: true,
        },
        BenchEngine::All => EngineSet::BOTH,
    };
    let config = BenchConfig {
        sizes,
        engines,
        cap,
        long,
        threads: bat::threads_from_env(),
    };
    let report = run_bench(&config).map_err(|e| Failure::input(e.to_string()))?;
    let text = match format {
        BenchFormat::Csv => report.to_csv(),
        BenchFormat::Json => report.to_json() + "\n",
        BenchFormat::Text => report.to_text(),
    };
    emit(&text, output)
}

/// Generated networks may give node 1 an arc to every other node.
fn check_size(n: usize) -> Result<(), Failure> {
    let max = MAX_OUT_DEGREE + 1;
    if (2..=max).contains(&n) {
        Ok(())
    } else {
        Err(Failure::input(format!(
            "node count must lie in 2..={max}, got {n}"
        )))
    }
}

fn cmd_gen(kind: GenKind) -> Result<(), Failure> {
    let (file, output) = match kind {
        GenKind::Semi { n, output } => {
            check_size(n)?;
            let (network, _) = gen_semi_complete(n);
            (NetworkFile::capture(&network, None), output)
        }
        GenKind::Random {
            n,
            seed,
            arc_prob,
            dirichlet,
            output,
        } => {
            check_size(n)?;
            if !(arc_prob > 0.0 && arc_prob <= 1.0) {
                return Err(Failure::input("--arc-prob must lie in (0, 1]"));
            }
            let (network, dist) = gen_random_amin(&RandomAminConfig {
                nodes: n,
                arc_probability: arc_prob,
                seed,
                dirichlet,
            });
            let file = NetworkFile::capture(&network, dirichlet.then_some(&dist));
            (file, output)
        }
    };
    emit(&(file.to_json() + "\n"), output.as_deref())
}

#[cfg(test)]
mod tests {
    use super::parse_range;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("5..7"), Ok(5..=7));
        assert_eq!(parse_range("5..=7"), Ok(5..=7));
        assert_eq!(parse_range("6"), Ok(6..=6));
        assert!(parse_range("5-7").is_err());
        assert!(parse_range("..7").is_err());
    }
}
