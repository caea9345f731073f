//! Command-line driver: generate instances, solve them with GRASP or the
//! myopic baseline, certify optima by enumeration, analyze search-space
//! hardness, and benchmark batches.
//!
//! Data goes to stdout or `--out`; diagnostics go to stderr; the exit status
//! is nonzero iff anything failed.

mod bench;
mod record;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ipmu::instance::{generate, ArcCount, GenSpec, Instance, InstanceKind, Severity};
use ipmu::oracle::{exact_enumerate, DEFAULT_ENUM_LIMIT};
use ipmu::paths::PathCache;
use ipmu::search::{grasp, kh_construct, Improvement, SearchConfig};
use ipmu::ssg::{DotOptions, SearchSpaceGraph, DEFAULT_SSG_LIMIT};

use record::{ConfigEcho, RunRecord};

#[derive(Parser)]
#[command(name = "ipmu", version, about = "Induced p-median with arc upgrades: solver toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random strongly connected benchmark instances.
    Generate(GenerateArgs),
    /// Solve one instance with GRASP or the myopic baseline.
    Solve(SolveArgs),
    /// Certify the optimum by exhaustive enumeration.
    Exact(ExactArgs),
    /// Enumerate the search-space graph and report its local optima.
    Ssg(SsgArgs),
    /// Run a batch of instances and aggregate a comparison table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    #[value(name = "P", alias = "p")]
    P,
    #[value(name = "R", alias = "r")]
    R,
}

impl From<KindArg> for InstanceKind {
    fn from(value: KindArg) -> Self {
        match value {
            KindArg::P => InstanceKind::Correlated,
            KindArg::R => InstanceKind::Random,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgorithmArg {
    Grasp,
    Kh,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LsArg {
    Best,
    First,
}

impl From<LsArg> for Improvement {
    fn from(value: LsArg) -> Self {
        match value {
            LsArg::Best => Improvement::Best,
            LsArg::First => Improvement::First,
        }
    }
}

#[derive(clap::Args)]
struct GenerateArgs {
    /// Node count.
    #[arg(long)]
    n: usize,
    /// Arc count (conflicts with --density).
    #[arg(long, conflicts_with = "density")]
    m: Option<usize>,
    /// Arc count as a fraction of n(n-1).
    #[arg(long)]
    density: Option<f64>,
    /// Medians to select.
    #[arg(long)]
    p: usize,
    /// Upgrade budget.
    #[arg(long)]
    budget: f64,
    /// P: cost correlated with time; R: independent.
    #[arg(long = "type")]
    kind: KindArg,
    /// Instances to emit (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Integer demand interval.
    #[arg(long, default_value_t = 1)]
    demand_min: u32,
    #[arg(long, default_value_t = 1)]
    demand_max: u32,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Grasp)]
    algorithm: AlgorithmArg,
    /// Construction greediness in [0, 1].
    #[arg(long, default_value_t = 0.51)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = LsArg::Best)]
    ls: LsArg,
    #[arg(long, default_value_t = 100)]
    max_iters: u64,
    #[arg(long, default_value_t = 29)]
    max_iters_wi: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = available parallelism).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Record file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ExactArgs {
    instance: PathBuf,
    /// Refuse when C(n, p) exceeds this many median sets.
    #[arg(long, default_value_t = DEFAULT_ENUM_LIMIT)]
    limit: u64,
    /// Heuristic record to compare against the certified optimum.
    #[arg(long)]
    compare: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SsgArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SSG_LIMIT)]
    limit: u64,
    /// Also write a DOT rendering here.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Fold basins larger than this into a summary node in the DOT output.
    #[arg(long)]
    collapse: Option<u64>,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Stats CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Directory of .ipmu instances.
    dir: PathBuf,
    /// Comma-separated subset of grasp,kh,exact.
    #[arg(long, default_value = "grasp,kh")]
    algorithms: String,
    /// Base seed; instance k (sorted by name) runs GRASP with seed + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ENUM_LIMIT)]
    exact_limit: u64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Table CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Exact(args) => cmd_exact(args),
        Command::Ssg(args) => cmd_ssg(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let arcs = match (args.m, args.density) {
        (Some(m), None) => ArcCount::Count(m),
        (None, Some(d)) => ArcCount::Density(d),
        (None, None) => bail!("one of --m or --density is required"),
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };
    let kind: InstanceKind = args.kind.into();
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    for k in 0..args.count {
        let spec = GenSpec {
            n: args.n,
            arcs,
            p: args.p,
            budget: args.budget,
            kind,
            demand_range: (args.demand_min, args.demand_max),
            seed: args.seed.wrapping_add(k as u64),
        };
        let instance = generate(&spec)?;
        let name = format!(
            "{}_n{}_m{}_p{}_B{}_s{}_i{}.ipmu",
            kind.tag(),
            args.n,
            instance.m(),
            args.p,
            args.budget,
            args.seed,
            k
        );
        let path = args.out.join(name);
        std::fs::write(&path, instance.to_text())
            .with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(())
}

/// Parse, validate (warnings to stderr, errors fatal), and cache paths.
fn load_instance(path: &Path) -> Result<(Instance, PathCache)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let instance = Instance::parse(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    let violations = instance.validate();
    let mut errors = 0;
    for v in &violations {
        match v.severity() {
            Severity::Error => {
                eprintln!("error: {v}");
                errors += 1;
            }
            Severity::Warning => eprintln!("warning: {v}"),
        }
    }
    if errors > 0 {
        bail!("{} invalid: {errors} violation(s)", path.display());
    }
    let cache = PathCache::compute(&instance)?;
    Ok((instance, cache))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    ipmu::set_thread_count(args.threads);
    let (instance, cache) = load_instance(&args.instance)?;
    let threads = ipmu::effective_parallelism();
    let instance_name = args.instance.display().to_string();

    let record = match args.algorithm {
        AlgorithmArg::Kh => {
            let start = Instant::now();
            let solution = kh_construct(&instance, &cache);
            let config = ConfigEcho {
                alpha: None,
                ls: None,
                max_iters: None,
                max_iters_wi: None,
                seed: None,
                threads,
            };
            RunRecord::from_solution(
                &instance_name,
                "kh",
                config,
                &solution,
                &instance,
                start.elapsed().as_secs_f64() * 1000.0,
                1,
                "unknown",
            )
        }
        AlgorithmArg::Grasp => {
            let config = SearchConfig {
                alpha: args.alpha,
                strategy: args.ls.into(),
                max_iters: args.max_iters,
                max_iters_wi: args.max_iters_wi,
                seed: args.seed,
            };
            let result = grasp(&instance, &cache, &config)?;
            let echo = ConfigEcho {
                alpha: Some(args.alpha),
                ls: Some(format!("{:?}", args.ls).to_lowercase()),
                max_iters: Some(args.max_iters),
                max_iters_wi: Some(args.max_iters_wi),
                seed: Some(args.seed),
                threads,
            };
            RunRecord::from_solution(
                &instance_name,
                "grasp",
                echo,
                &result.best,
                &instance,
                result.wall_time.as_secs_f64() * 1000.0,
                result.iterations_run,
                "unknown",
            )
        }
    };
    record.verify(&instance, &cache)?;
    emit(args.out.as_deref(), &record.to_json())
}

fn cmd_exact(args: ExactArgs) -> Result<()> {
    ipmu::set_thread_count(args.threads);
    let (instance, cache) = load_instance(&args.instance)?;
    let start = Instant::now();
    let result = exact_enumerate(&instance, &cache, args.limit)?;
    let mut record = RunRecord::from_solution(
        &args.instance.display().to_string(),
        "exact",
        ConfigEcho {
            alpha: None,
            ls: None,
            max_iters: None,
            max_iters_wi: None,
            seed: None,
            threads: ipmu::effective_parallelism(),
        },
        &result.best,
        &instance,
        start.elapsed().as_secs_f64() * 1000.0,
        result.explored,
        "certified",
    );
    record.ties = Some(result.ties);
    record.explored = Some(result.explored);

    if let Some(compare) = &args.compare {
        let text = std::fs::read_to_string(compare)
            .with_context(|| format!("reading {}", compare.display()))?;
        let heuristic = RunRecord::from_json(&text)?;
        let optimum = result.best.objective;
        let deviation = if heuristic.objective - optimum <= 1e-9 * optimum.max(1.0) {
            0.0
        } else {
            100.0 * (heuristic.objective - optimum) / optimum
        };
        record.compared_objective = Some(heuristic.objective);
        record.deviation_percent = Some(deviation);
    }

    record.verify(&instance, &cache)?;
    emit(args.out.as_deref(), &record.to_json())
}

fn cmd_ssg(args: SsgArgs) -> Result<()> {
    ipmu::set_thread_count(args.threads);
    let (instance, cache) = load_instance(&args.instance)?;
    let ssg = SearchSpaceGraph::build(&instance, &cache, args.limit)?;
    let stats = ssg.stats();
    eprintln!(
        "{}: {} sets, {} edges, {} local optima, global basin share {:.3}",
        args.instance.display(),
        ssg.node_count(),
        ssg.edge_count(),
        stats.local_optima_count(),
        stats.global_basin_share
    );
    if let Some(dot_path) = &args.dot {
        let dot = ssg.to_dot(&DotOptions { collapse_threshold: args.collapse });
        std::fs::write(dot_path, dot)
            .with_context(|| format!("writing {}", dot_path.display()))?;
    }
    emit(args.out.as_deref(), &stats.to_csv())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    ipmu::set_thread_count(args.threads);
    let algorithms = bench::parse_algorithms(&args.algorithms)?;
    let report = bench::run_bench(&args.dir, &algorithms, args.seed, args.exact_limit)?;
    emit(args.out.as_deref(), &report.csv)?;
    if report.failures > 0 {
        bail!("{} run(s) failed; see stderr", report.failures);
    }
    Ok(())
}
