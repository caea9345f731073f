//! Exact references for desk-scale verification: exhaustive enumeration of
//! all p-element median sets, and an LP-vertex enumeration that independently
//! certifies the greedy budget split.
//!
//! Both either certify an exact answer or refuse; neither truncates.

use thiserror::Error;

use crate::exec;
use crate::instance::Instance;
use crate::paths::PathCache;
use crate::subsets::{self, binomial, SubsetIndexer};
use crate::upgrade::{self, ArcWeights, EvaluatedSolution, UpgradePlan};

/// Default cap on C(n, p) for [`exact_enumerate`].
pub const DEFAULT_ENUM_LIMIT: u64 = 5_000_000;

/// Most positive-weight arcs [`knapsack_vertex_oracle`] will enumerate.
pub const MAX_VERTEX_ARCS: usize = 15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("C({n}, {p}) = {count} median sets exceeds the limit of {limit}")]
    TooManySubsets { n: usize, p: usize, count: u128, limit: u64 },
    #[error("{count} positive-weight arcs exceed the vertex-enumeration cap of {max}")]
    TooManyPositiveArcs { count: usize, max: usize },
}

/// A certified optimum over every p-element median set.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalResult {
    pub best: EvaluatedSolution,
    /// Median sets attaining exactly the optimal objective value.
    pub ties: u64,
    /// Sets evaluated: C(n, p).
    pub explored: u64,
}

/// Evaluates every p-subset and returns the minimum; ties in the objective go
/// to the lexicographically smallest set. Refuses when C(n, p) exceeds
/// `limit`.
pub fn exact_enumerate(
    instance: &Instance,
    cache: &PathCache,
    limit: u64,
) -> Result<OptimalResult, OracleError> {
    let (n, p) = (instance.n, instance.p);
    let count = binomial(n as u64, p as u64);
    if count > limit as u128 {
        return Err(OracleError::TooManySubsets { n, p, count, limit });
    }
    let total = count as u64;
    let indexer = SubsetIndexer::new(n, p);

    // Enumerate in rank-contiguous blocks: each worker walks lexicographic
    // successors from its block start, so no per-set allocation happens.
    const BLOCK: u64 = 256;
    let blocks = total.div_ceil(BLOCK) as usize;
    // (objective, lexicographically-smallest rank at that value, tie count)
    let best = exec::map_reduce(
        blocks,
        |block| {
            let start = block as u64 * BLOCK;
            let end = (start + BLOCK).min(total);
            let mut set = indexer.unrank(start);
            let mut local = (f64::INFINITY, u64::MAX, 0u64);
            for rank in start..end {
                if rank > start {
                    subsets::next_combination(&mut set, n);
                }
                let value = upgrade::objective_of(instance, cache, &set);
                match value.total_cmp(&local.0) {
                    std::cmp::Ordering::Less => local = (value, rank, 1),
                    std::cmp::Ordering::Equal => local.2 += 1,
                    std::cmp::Ordering::Greater => {}
                }
            }
            local
        },
        |a, b| match a.0.total_cmp(&b.0) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => (a.0, a.1.min(b.1), a.2 + b.2),
        },
    )
    .expect("C(n, p) >= 1 for any valid instance");

    let set = indexer.unrank(best.1);
    let solution = upgrade::evaluate(instance, cache, &set).expect("enumerated set is valid");
    debug_assert_eq!(solution.objective.to_bits(), best.0.to_bits());
    Ok(OptimalResult { best: solution, ties: best.2, explored: total })
}

/// Maximizes the budget split by enumerating the LP vertices of the knapsack
/// polytope: every subset of positive-weight arcs fully saturated, plus at
/// most one further arc taking the residual budget. Independent of the
/// greedy route by construction.
pub fn knapsack_vertex_oracle(
    instance: &Instance,
    weights: &ArcWeights,
) -> Result<UpgradePlan, OracleError> {
    let positive: Vec<usize> = (0..instance.m()).filter(|&a| weights.w[a] > 0.0).collect();
    if positive.len() > MAX_VERTEX_ARCS {
        return Err(OracleError::TooManyPositiveArcs {
            count: positive.len(),
            max: MAX_VERTEX_ARCS,
        });
    }
    let budget = instance.budget;
    let mut best_gain = f64::NEG_INFINITY;
    let mut best: Option<Vec<f64>> = None;

    for mask in 0u32..1u32 << positive.len() {
        let mut used = 0.0;
        let mut gain = 0.0;
        let mut feasible = true;
        for (bit, &arc) in positive.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                used += instance.arcs[arc].u;
                gain += weights.w[arc] * instance.arcs[arc].u;
                if used > budget {
                    feasible = false;
                    break;
                }
            }
        }
        if !feasible {
            continue;
        }
        // the saturated set alone, then each choice of one fractional arc
        for extra in std::iter::once(None).chain(positive.iter().map(Some)) {
            let mut total_gain = gain;
            let mut fractional: Option<(usize, f64)> = None;
            if let Some(&arc) = extra {
                let bit = positive.iter().position(|&x| x == arc).unwrap();
                if mask >> bit & 1 == 1 {
                    continue; // already saturated
                }
                let amount = (budget - used).min(instance.arcs[arc].u);
                if amount <= 0.0 {
                    continue;
                }
                total_gain += weights.w[arc] * amount;
                fractional = Some((arc, amount));
            }
            if total_gain > best_gain {
                best_gain = total_gain;
                let mut b = vec![0.0; instance.m()];
                for (bit, &arc) in positive.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        b[arc] = instance.arcs[arc].u;
                    }
                }
                if let Some((arc, amount)) = fractional {
                    b[arc] = amount;
                }
                best = Some(b);
            }
        }
    }

    let b = best.unwrap_or_else(|| vec![0.0; instance.m()]);
    let gain = if best_gain.is_finite() { best_gain } else { 0.0 };
    Ok(UpgradePlan { b, gain })
}
