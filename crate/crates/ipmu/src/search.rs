//! Heuristic solvers: the myopic Kuehn-Hamburger baseline, GRASP
//! construction with a restricted candidate list, swap local search, and the
//! multi-start GRASP loop.
//!
//! Randomness comes from a seeded ChaCha8 stream, one per run, so traces are
//! reproducible across platforms. Candidate evaluations inside construction
//! and best-improvement sweeps are pure maps reduced by a total order on
//! `(objective, candidate)`, which makes results independent of the worker
//! count.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec;
use crate::instance::Instance;
use crate::paths::PathCache;
use crate::upgrade::{self, Assignment, EvaluatedSolution};

/// Absolute tolerance for declaring one objective value an improvement over
/// another: `new < old - IMPROVEMENT_EPS`.
pub const IMPROVEMENT_EPS: f64 = 1e-9;

/// Local search step rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Improvement {
    /// Move to the best improving swap neighbor each round.
    Best,
    /// Take the first improving swap in scan order and restart the scan.
    First,
}

impl std::str::FromStr for Improvement {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "best" => Ok(Improvement::Best),
            "first" => Ok(Improvement::First),
            other => Err(format!("unknown strategy '{other}' (expected best or first)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Construction greediness in [0, 1]: 1 is pure greedy, 0 uniform random.
    pub alpha: f64,
    pub strategy: Improvement,
    pub max_iters: u64,
    /// Iterations tolerated without improving the incumbent.
    pub max_iters_wi: u64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { alpha: 0.51, strategy: Improvement::Best, max_iters: 100, max_iters_wi: 29, seed: 0 }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if !(0.0..=1.0).contains(&self.alpha) || self.alpha.is_nan() {
            return Err(SearchError::InvalidAlpha { alpha: self.alpha });
        }
        if self.max_iters < 1 || self.max_iters_wi > self.max_iters {
            return Err(SearchError::InvalidIterationBounds {
                max_iters: self.max_iters,
                max_iters_wi: self.max_iters_wi,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("alpha must lie in [0, 1] (got {alpha})")]
    InvalidAlpha { alpha: f64 },
    #[error("need max_iters >= 1 and max_iters_wi <= max_iters (got {max_iters}, {max_iters_wi})")]
    InvalidIterationBounds { max_iters: u64, max_iters_wi: u64 },
    #[error("hamming distance needs equal-size sets (got {left} and {right})")]
    SizeMismatch { left: usize, right: usize },
}

/// Objective values observed in one multi-start iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationTrace {
    /// After construction.
    pub constructed: f64,
    /// After local search.
    pub improved: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: EvaluatedSolution,
    pub iterations_run: u64,
    /// Iteration (1-based) that last improved the incumbent.
    pub iterations_at_best: u64,
    pub wall_time: Duration,
    pub trace: Vec<IterationTrace>,
}

/// Swap distance between equal-size median sets: the number of exchanged
/// elements.
pub fn hamming(a: &[usize], b: &[usize]) -> Result<usize, SearchError> {
    if a.len() != b.len() {
        return Err(SearchError::SizeMismatch { left: a.len(), right: b.len() });
    }
    let mut left = a.to_vec();
    let mut right = b.to_vec();
    left.sort_unstable();
    right.sort_unstable();
    let mut diff = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        match left[i].cmp(&right[j]) {
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => {
                diff += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                diff += 1;
                j += 1;
            }
        }
    }
    diff += left.len() - i + right.len() - j;
    Ok(diff / 2)
}

/// Per-client best and second-best medians of the current partial solution,
/// keyed by (c1, c2, median id). Lets construction score `S + {candidate}`
/// in O(n) instead of O(n |S|); full evaluations cross-check it in debug
/// builds.
#[derive(Debug, Clone)]
struct NearestMedians {
    best: Vec<(f64, f64, usize)>,
    second: Vec<(f64, f64, usize)>,
}

const NO_MEDIAN: (f64, f64, usize) = (f64::INFINITY, f64::INFINITY, usize::MAX);

impl NearestMedians {
    fn new(n: usize) -> Self {
        Self { best: vec![NO_MEDIAN; n], second: vec![NO_MEDIAN; n] }
    }

    fn push(&mut self, cache: &PathCache, median: usize) {
        for i in 1..=self.best.len() {
            let key = (cache.c1(i, median), cache.c2(i, median), median);
            if key < self.best[i - 1] {
                self.second[i - 1] = self.best[i - 1];
                self.best[i - 1] = key;
            } else if key < self.second[i - 1] {
                self.second[i - 1] = key;
            }
        }
    }
}

#[cfg(debug_assertions)]
static FAST_EVAL_CALLS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

/// F(S + {extra}) where `nearest` summarizes S. The serving median per
/// client is the smaller of its incumbent key and the candidate's key.
fn score_with_candidate(
    instance: &Instance,
    cache: &PathCache,
    nearest: &NearestMedians,
    chosen: &[usize],
    extra: usize,
) -> f64 {
    let n = instance.n;
    let mut serving = vec![0usize; n];
    for i in 1..=n {
        let cand = (cache.c1(i, extra), cache.c2(i, extra), extra);
        let incumbent = nearest.best[i - 1];
        serving[i - 1] = if cand < incumbent { cand.2 } else { incumbent.2 };
    }
    let assignment = Assignment { serving };
    let value = upgrade::objective_from_assignment(instance, cache, &assignment);

    #[cfg(debug_assertions)]
    {
        use std::sync::atomic::Ordering;
        if FAST_EVAL_CALLS.fetch_add(1, Ordering::Relaxed) % 100 == 0 {
            let mut set = chosen.to_vec();
            set.push(extra);
            let naive = upgrade::evaluate(instance, cache, &set).expect("valid candidate set");
            assert_eq!(
                value.to_bits(),
                naive.objective.to_bits(),
                "incremental construction score diverged from full evaluation"
            );
        }
    }
    #[cfg(not(debug_assertions))]
    let _ = chosen;

    value
}

/// Myopic greedy construction: repeatedly add the candidate whose inclusion
/// minimizes the objective (ties to the smaller node id) until p medians are
/// placed. Deterministic.
pub fn kh_construct(instance: &Instance, cache: &PathCache) -> EvaluatedSolution {
    let n = instance.n;
    let mut chosen: Vec<usize> = Vec::with_capacity(instance.p);
    let mut nearest = NearestMedians::new(n);
    let mut candidates: Vec<usize> = (1..=n).collect();
    while chosen.len() < instance.p {
        let (_, pick) = exec::map_reduce(
            candidates.len(),
            |k| {
                let cand = candidates[k];
                (score_with_candidate(instance, cache, &nearest, &chosen, cand), cand)
            },
            min_by_value_then_id,
        )
        .expect("candidate list is never empty while |S| < p < n");
        nearest.push(cache, pick);
        chosen.push(pick);
        candidates.retain(|&c| c != pick);
    }
    chosen.sort_unstable();
    upgrade::evaluate(instance, cache, &chosen).expect("constructed set is valid")
}

fn min_by_value_then_id(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    if b.0.total_cmp(&a.0).then_with(|| b.1.cmp(&a.1)).is_lt() {
        b
    } else {
        a
    }
}

/// GRASP construction: score every candidate, keep those within the
/// alpha-threshold of the greedy best, and pick one uniformly at random.
/// Returns the chosen median set, sorted ascending.
pub fn grasp_construct<R: Rng>(
    instance: &Instance,
    cache: &PathCache,
    alpha: f64,
    rng: &mut R,
) -> Vec<usize> {
    construct_randomized(instance, cache, alpha, rng).0
}

fn construct_randomized<R: Rng>(
    instance: &Instance,
    cache: &PathCache,
    alpha: f64,
    rng: &mut R,
) -> (Vec<usize>, f64) {
    let n = instance.n;
    let mut chosen: Vec<usize> = Vec::with_capacity(instance.p);
    let mut nearest = NearestMedians::new(n);
    let mut candidates: Vec<usize> = (1..=n).collect();
    let mut last_value = f64::INFINITY;
    while chosen.len() < instance.p {
        let scores: Vec<f64> = exec::map_collect(candidates.len(), |k| {
            score_with_candidate(instance, cache, &nearest, &chosen, candidates[k])
        });
        let f_min = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let f_max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let threshold = f_max + alpha * (f_min - f_max);
        let rcl: Vec<usize> = (0..candidates.len()).filter(|&k| scores[k] <= threshold).collect();
        debug_assert!(!rcl.is_empty(), "the greedy argmin always qualifies");
        let k = rcl[rng.gen_range(0..rcl.len())];
        let pick = candidates[k];
        last_value = scores[k];
        nearest.push(cache, pick);
        chosen.push(pick);
        candidates.remove(k);
    }
    chosen.sort_unstable();
    (chosen, last_value)
}

/// Swap local search: exchanges one selected median for an unselected node
/// until no exchange improves the objective by more than
/// [`IMPROVEMENT_EPS`].
pub fn local_search(
    instance: &Instance,
    cache: &PathCache,
    medians: &[usize],
    strategy: Improvement,
) -> EvaluatedSolution {
    let mut current = upgrade::evaluate(instance, cache, medians).expect("valid starting set");
    loop {
        let step = match strategy {
            Improvement::Best => best_swap(instance, cache, &current),
            Improvement::First => first_swap(instance, cache, &current),
        };
        match step {
            Some(next) => current = next,
            None => return current,
        }
    }
}

/// Neighbor set with `removed` swapped out and `added` swapped in, sorted.
fn swapped(medians: &[usize], removed: usize, added: usize) -> Vec<usize> {
    let mut set: Vec<usize> =
        medians.iter().copied().filter(|&x| x != removed).collect();
    let pos = set.partition_point(|&x| x < added);
    set.insert(pos, added);
    set
}

/// Best improving swap, ties broken by the lexicographically smallest
/// (removed id, added id). The same key orders successors in the search
/// space graph, so trajectories coincide.
fn best_swap(
    instance: &Instance,
    cache: &PathCache,
    current: &EvaluatedSolution,
) -> Option<EvaluatedSolution> {
    let member = {
        let mut mask = vec![false; instance.n + 1];
        for &j in &current.medians {
            mask[j] = true;
        }
        mask
    };
    let mut moves: Vec<(usize, usize)> = Vec::new();
    for &removed in &current.medians {
        for added in 1..=instance.n {
            if !member[added] {
                moves.push((removed, added));
            }
        }
    }
    let best = exec::map_reduce(
        moves.len(),
        |k| {
            let (removed, added) = moves[k];
            let set = swapped(&current.medians, removed, added);
            (upgrade::objective_of(instance, cache, &set), removed, added)
        },
        |a, b| {
            let ord = b.0.total_cmp(&a.0).then_with(|| (b.1, b.2).cmp(&(a.1, a.2)));
            if ord.is_lt() {
                b
            } else {
                a
            }
        },
    )?;
    if best.0 < current.objective - IMPROVEMENT_EPS {
        let set = swapped(&current.medians, best.1, best.2);
        Some(upgrade::evaluate(instance, cache, &set).expect("valid neighbor"))
    } else {
        None
    }
}

/// First improving swap in scan order: removed ids ascending, added ids
/// ascending.
fn first_swap(
    instance: &Instance,
    cache: &PathCache,
    current: &EvaluatedSolution,
) -> Option<EvaluatedSolution> {
    for &removed in &current.medians {
        for added in 1..=instance.n {
            if current.medians.binary_search(&added).is_ok() {
                continue;
            }
            let set = swapped(&current.medians, removed, added);
            let value = upgrade::objective_of(instance, cache, &set);
            if value < current.objective - IMPROVEMENT_EPS {
                return Some(upgrade::evaluate(instance, cache, &set).expect("valid neighbor"));
            }
        }
    }
    None
}

/// Multi-start GRASP: build, improve, and keep the incumbent until either
/// iteration budget runs out. Both loop guards are inclusive, so up to
/// `max_iters + 1` iterations run and the loop stops within
/// `max_iters_wi + 1` iterations of the last improvement.
pub fn grasp(
    instance: &Instance,
    cache: &PathCache,
    config: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    config.validate()?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<EvaluatedSolution> = None;
    let mut trace = Vec::new();
    let mut iters: u64 = 0;
    let mut iters_wi: u64 = 0;
    let mut iterations_at_best: u64 = 0;

    while iters <= config.max_iters && iters_wi <= config.max_iters_wi {
        iters += 1;
        iters_wi += 1;
        let (built, built_value) = construct_randomized(instance, cache, config.alpha, &mut rng);
        let improved = local_search(instance, cache, &built, config.strategy);
        trace.push(IterationTrace { constructed: built_value, improved: improved.objective });
        let accept = match &best {
            None => true,
            Some(incumbent) => improved.objective < incumbent.objective - IMPROVEMENT_EPS,
        };
        if accept {
            iters_wi = 0;
            iterations_at_best = iters;
            best = Some(improved);
        }
    }

    Ok(SearchResult {
        best: best.expect("at least one iteration always runs"),
        iterations_run: iters,
        iterations_at_best,
        wall_time: start.elapsed(),
        trace,
    })
}
