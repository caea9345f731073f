//! Batch benchmarking over a directory of instance files: runs the selected
//! algorithms on every instance, pools the best-known value per instance,
//! and aggregates one CSV row per (instance type, algorithm).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};

use ipmu::instance::Instance;
use ipmu::oracle::exact_enumerate;
use ipmu::paths::PathCache;
use ipmu::search::{grasp, kh_construct, SearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchAlgorithm {
    Grasp,
    Kh,
    Exact,
}

impl BenchAlgorithm {
    fn name(self) -> &'static str {
        match self {
            BenchAlgorithm::Grasp => "grasp",
            BenchAlgorithm::Kh => "kh",
            BenchAlgorithm::Exact => "exact",
        }
    }
}

pub fn parse_algorithms(spec: &str) -> Result<Vec<BenchAlgorithm>> {
    let mut out = Vec::new();
    for token in spec.split(',') {
        let algorithm = match token.trim() {
            "grasp" => BenchAlgorithm::Grasp,
            "kh" => BenchAlgorithm::Kh,
            "exact" => BenchAlgorithm::Exact,
            other => bail!("unknown algorithm '{other}' (expected grasp, kh, exact)"),
        };
        if !out.contains(&algorithm) {
            out.push(algorithm);
        }
    }
    if out.is_empty() {
        bail!("no algorithms selected");
    }
    Ok(out)
}

/// Instance type from the generator's file naming scheme (P_*/R_*), or "U"
/// for files named otherwise.
fn type_of(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    match stem.split('_').next() {
        Some("P") => "P".to_string(),
        Some("R") => "R".to_string(),
        _ => "U".to_string(),
    }
}

struct RunOutcome {
    kind: String,
    algorithm: BenchAlgorithm,
    objective: f64,
    time_ms: f64,
    certified: bool,
}

struct Aggregate {
    count: usize,
    objective_sum: f64,
    time_sum: f64,
    dev_sum: f64,
    best: usize,
    optimal: usize,
}

fn attained(value: f64, reference: f64) -> bool {
    value - reference <= 1e-9 * reference.max(1.0)
}

fn deviation_pct(value: f64, reference: f64) -> f64 {
    if attained(value, reference) {
        0.0
    } else {
        100.0 * (value - reference) / reference
    }
}

pub struct BenchReport {
    pub csv: String,
    pub failures: usize,
}

pub fn run_bench(
    dir: &Path,
    algorithms: &[BenchAlgorithm],
    base_seed: u64,
    exact_limit: u64,
) -> Result<BenchReport> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading instance directory {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "ipmu"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .ipmu instances in {}", dir.display());
    }

    let mut failures = 0usize;
    // per instance: outcomes plus the pooled best-known value
    let mut per_instance: Vec<(Vec<RunOutcome>, f64, Option<f64>)> = Vec::new();

    for (index, path) in files.iter().enumerate() {
        let kind = type_of(path);
        let loaded = (|| -> Result<(Instance, PathCache)> {
            let text = std::fs::read_to_string(path)?;
            let instance = Instance::parse(&text)?;
            let violations = instance.validate();
            if violations.iter().any(|v| v.severity() == ipmu::instance::Severity::Error) {
                bail!("instance invalid: {}", violations[0]);
            }
            let cache = PathCache::compute(&instance)?;
            Ok((instance, cache))
        })();
        let (instance, cache) = match loaded {
            Ok(pair) => pair,
            Err(err) => {
                eprintln!("bench: skipping {}: {err:#}", path.display());
                failures += 1;
                continue;
            }
        };

        let mut outcomes = Vec::new();
        let mut exact_value = None;
        for &algorithm in algorithms {
            let start = Instant::now();
            let result: Result<(f64, bool)> = match algorithm {
                BenchAlgorithm::Grasp => {
                    let config = SearchConfig {
                        seed: base_seed.wrapping_add(index as u64),
                        ..Default::default()
                    };
                    grasp(&instance, &cache, &config)
                        .map(|r| (r.best.objective, false))
                        .map_err(Into::into)
                }
                BenchAlgorithm::Kh => Ok((kh_construct(&instance, &cache).objective, false)),
                BenchAlgorithm::Exact => exact_enumerate(&instance, &cache, exact_limit)
                    .map(|r| (r.best.objective, true))
                    .map_err(Into::into),
            };
            match result {
                Ok((objective, certified)) => {
                    if certified {
                        exact_value = Some(objective);
                    }
                    outcomes.push(RunOutcome {
                        kind: kind.clone(),
                        algorithm,
                        objective,
                        time_ms: start.elapsed().as_secs_f64() * 1000.0,
                        certified,
                    });
                }
                Err(err) => {
                    eprintln!(
                        "bench: {} on {}: {err:#}",
                        algorithm.name(),
                        path.display()
                    );
                    failures += 1;
                }
            }
        }
        if outcomes.is_empty() {
            continue;
        }
        let best_known =
            outcomes.iter().map(|o| o.objective).fold(f64::INFINITY, f64::min);
        per_instance.push((outcomes, best_known, exact_value));
    }

    let mut table: BTreeMap<(String, &'static str), Aggregate> = BTreeMap::new();
    for (outcomes, best_known, exact_value) in &per_instance {
        for outcome in outcomes {
            let entry = table
                .entry((outcome.kind.clone(), outcome.algorithm.name()))
                .or_insert(Aggregate {
                    count: 0,
                    objective_sum: 0.0,
                    time_sum: 0.0,
                    dev_sum: 0.0,
                    best: 0,
                    optimal: 0,
                });
            entry.count += 1;
            entry.objective_sum += outcome.objective;
            entry.time_sum += outcome.time_ms;
            entry.dev_sum += deviation_pct(outcome.objective, *best_known);
            if attained(outcome.objective, *best_known) {
                entry.best += 1;
            }
            if let Some(optimum) = exact_value {
                if outcome.certified || attained(outcome.objective, *optimum) {
                    entry.optimal += 1;
                }
            }
        }
    }

    let mut csv =
        String::from("type,algorithm,instances,avg_objective,avg_time_ms,avg_dev_percent,best_count,certified_opt_count\n");
    for ((kind, algorithm), agg) in &table {
        let n = agg.count as f64;
        let _ = writeln!(
            csv,
            "{},{},{},{},{:.3},{},{},{}",
            kind,
            algorithm,
            agg.count,
            agg.objective_sum / n,
            agg.time_sum / n,
            agg.dev_sum / n,
            agg.best,
            agg.optimal
        );
    }
    Ok(BenchReport { csv, failures })
}
