//! Solution evaluation: client assignment, per-arc upgrade weights, the
//! bounded fractional-knapsack budget split, and the objective value.
//!
//! Evaluating a median set S works for partial sets too (fewer than p
//! medians), which the constructive heuristics rely on. All functions here
//! are pure over immutable inputs and safe to call from parallel workers.

use thiserror::Error;

use crate::instance::Instance;
use crate::paths::PathCache;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("cannot evaluate an empty median set")]
    EmptyMedianSet,
    #[error("median id {id} out of range 1..={n}")]
    MedianOutOfRange { id: usize, n: usize },
}

/// Which median serves each client.
///
/// A client is served by the median reaching it fastest; time ties go to the
/// lower-cost path, then to the smaller median id. Medians serve themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `serving[i]` is the median id serving node `i + 1`.
    pub serving: Vec<usize>,
}

impl Assignment {
    pub fn serving_of(&self, client: usize) -> usize {
        self.serving[client - 1]
    }
}

/// Demand-weighted usage of each arc across all served fastest paths: the
/// value density of upgrading that arc.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcWeights {
    /// Indexed by arc id.
    pub w: Vec<f64>,
}

/// A feasible budget split: per-arc reductions within caps, total within
/// budget.
#[derive(Debug, Clone, PartialEq)]
pub struct UpgradePlan {
    /// Indexed by arc id.
    pub b: Vec<f64>,
    /// Objective improvement the plan buys: sum of w(a) * b(a).
    pub gain: f64,
}

/// A fully evaluated median set.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedSolution {
    /// Sorted ascending.
    pub medians: Vec<usize>,
    pub assignment: Assignment,
    pub plan: UpgradePlan,
    /// Demand-weighted served cost after upgrades.
    pub objective: f64,
    /// Served cost with no upgrades applied.
    pub base_cost: f64,
}

fn checked_medians(cache: &PathCache, medians: &[usize]) -> Result<Vec<usize>, EvalError> {
    if medians.is_empty() {
        return Err(EvalError::EmptyMedianSet);
    }
    let mut set = medians.to_vec();
    set.sort_unstable();
    set.dedup();
    if let Some(&bad) = set.iter().find(|&&id| id < 1 || id > cache.n()) {
        return Err(EvalError::MedianOutOfRange { id: bad, n: cache.n() });
    }
    Ok(set)
}

/// Assigns every client to its serving median in S.
pub fn assign(cache: &PathCache, medians: &[usize]) -> Result<Assignment, EvalError> {
    let set = checked_medians(cache, medians)?;
    Ok(assign_unchecked(cache, &set))
}

pub(crate) fn assign_unchecked(cache: &PathCache, medians: &[usize]) -> Assignment {
    debug_assert!(medians.windows(2).all(|w| w[0] < w[1]), "medians must be sorted");
    let n = cache.n();
    let mut serving = vec![0usize; n];
    for i in 1..=n {
        let mut best = medians[0];
        let mut key = (cache.c1(i, best), cache.c2(i, best));
        for &j in &medians[1..] {
            let cand = (cache.c1(i, j), cache.c2(i, j));
            // medians iterated ascending, so strict < keeps the smallest id
            if cand < key {
                key = cand;
                best = j;
            }
        }
        serving[i - 1] = best;
    }
    Assignment { serving }
}

/// Accumulates w(a): the demand of every client whose served fastest path
/// traverses arc a. Only the one canonical path per client counts.
pub fn arc_weights(instance: &Instance, cache: &PathCache, assignment: &Assignment) -> ArcWeights {
    let mut w = vec![0.0; instance.m()];
    for i in 1..=instance.n {
        let demand = instance.demand_of(i);
        if demand == 0.0 {
            continue;
        }
        let median = assignment.serving_of(i);
        cache.for_each_path_arc(i, median, |arc_id| {
            w[arc_id] += demand;
        });
    }
    ArcWeights { w }
}

/// Greedy solution of the bounded fractional knapsack: saturate arcs in
/// descending weight order (ties by ascending arc id) until the budget runs
/// out. Arcs with zero weight never receive budget. O(|A| log |A|).
pub fn relax_edges(instance: &Instance, weights: &ArcWeights) -> UpgradePlan {
    debug_assert_eq!(weights.w.len(), instance.m());
    let mut order: Vec<usize> = (0..instance.m()).filter(|&a| weights.w[a] > 0.0).collect();
    order.sort_by(|&a, &b| weights.w[b].total_cmp(&weights.w[a]).then_with(|| a.cmp(&b)));

    let mut b = vec![0.0; instance.m()];
    let mut gain = 0.0;
    let mut remaining = instance.budget;
    for arc_id in order {
        if remaining <= 0.0 {
            break;
        }
        let amount = remaining.min(instance.arcs[arc_id].u);
        if amount > 0.0 {
            b[arc_id] = amount;
            gain += weights.w[arc_id] * amount;
            remaining -= amount;
        }
    }
    UpgradePlan { b, gain }
}

/// Evaluates a complete or partial median set: assignment, arc weights,
/// budget split, and the resulting objective.
pub fn evaluate(
    instance: &Instance,
    cache: &PathCache,
    medians: &[usize],
) -> Result<EvaluatedSolution, EvalError> {
    let set = checked_medians(cache, medians)?;
    let assignment = assign_unchecked(cache, &set);
    Ok(finish_evaluation(instance, cache, set, assignment))
}

/// Shared tail of every evaluation path: weights, knapsack, objective.
pub(crate) fn finish_evaluation(
    instance: &Instance,
    cache: &PathCache,
    medians: Vec<usize>,
    assignment: Assignment,
) -> EvaluatedSolution {
    let weights = arc_weights(instance, cache, &assignment);
    let plan = relax_edges(instance, &weights);
    let (objective, base_cost) = objective_parts(instance, cache, &assignment, &plan.b);
    EvaluatedSolution { medians, assignment, plan, objective, base_cost }
}

/// (objective, base cost): per-client served costs, upgrades subtracted once
/// per client traversing an upgraded arc.
fn objective_parts(
    instance: &Instance,
    cache: &PathCache,
    assignment: &Assignment,
    b: &[f64],
) -> (f64, f64) {
    let mut objective = 0.0;
    let mut base = 0.0;
    for i in 1..=instance.n {
        let demand = instance.demand_of(i);
        let median = assignment.serving_of(i);
        let cost = cache.c2(i, median);
        let mut reduction = 0.0;
        cache.for_each_path_arc(i, median, |arc_id| reduction += b[arc_id]);
        objective += demand * (cost - reduction);
        base += demand * cost;
    }
    (objective, base)
}

/// Objective of a sorted median set, skipping the solution structs. Hot path
/// for neighborhood sweeps.
pub(crate) fn objective_of(instance: &Instance, cache: &PathCache, medians: &[usize]) -> f64 {
    objective_from_assignment(instance, cache, &assign_unchecked(cache, medians))
}

/// Objective implied by a fixed assignment: weights, budget split, and the
/// per-client cost sum.
pub(crate) fn objective_from_assignment(
    instance: &Instance,
    cache: &PathCache,
    assignment: &Assignment,
) -> f64 {
    let weights = arc_weights(instance, cache, assignment);
    let plan = relax_edges(instance, &weights);
    objective_parts(instance, cache, assignment, &plan.b).0
}

/// Recomputes the objective for a recorded plan `b` (indexed by arc id) on
/// the given median set. Used to re-validate emitted solution records.
pub fn objective_with_plan(
    instance: &Instance,
    cache: &PathCache,
    medians: &[usize],
    b: &[f64],
) -> Result<f64, EvalError> {
    let set = checked_medians(cache, medians)?;
    let assignment = assign_unchecked(cache, &set);
    Ok(objective_parts(instance, cache, &assignment, b).0)
}
