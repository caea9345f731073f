//! Run records: the single-document JSON result of a solve/exact run.
//!
//! Field order is fixed by the struct definition and serialization is
//! pretty-printed one field per line, so records diff cleanly and golden
//! tests stay stable. `wall_time_ms` is the only field expected to vary
//! between identical reruns.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use ipmu::instance::Instance;
use ipmu::paths::PathCache;
use ipmu::upgrade::{objective_with_plan, EvaluatedSolution};

/// Tolerance for re-validating a record's objective against a fresh
/// evaluation of its medians and plan.
pub const RECORD_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: String,
    pub config: ConfigEcho,
    pub objective: f64,
    pub medians: Vec<usize>,
    /// Nonzero per-arc upgrades.
    pub upgrades: Vec<UpgradeEntry>,
    pub wall_time_ms: f64,
    pub iterations: u64,
    /// "certified", "best-known", or "unknown".
    pub optimality: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ties: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explored: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compared_objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation_percent: Option<f64>,
}

/// Everything needed to reproduce the run (with the same binary and
/// instance file).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ls: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters_wi: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub threads: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UpgradeEntry {
    pub arc: usize,
    pub src: usize,
    pub dst: usize,
    pub amount: f64,
}

pub fn upgrade_entries(instance: &Instance, b: &[f64]) -> Vec<UpgradeEntry> {
    b.iter()
        .enumerate()
        .filter(|(_, &amount)| amount > 0.0)
        .map(|(arc, &amount)| UpgradeEntry {
            arc,
            src: instance.arcs[arc].src,
            dst: instance.arcs[arc].dst,
            amount,
        })
        .collect()
}

impl RunRecord {
    pub fn from_solution(
        instance_path: &str,
        algorithm: &str,
        config: ConfigEcho,
        solution: &EvaluatedSolution,
        instance: &Instance,
        wall_time_ms: f64,
        iterations: u64,
        optimality: &str,
    ) -> Self {
        RunRecord {
            instance: instance_path.to_string(),
            algorithm: algorithm.to_string(),
            seed: config.seed,
            config,
            objective: solution.objective,
            medians: solution.medians.clone(),
            upgrades: upgrade_entries(instance, &solution.plan.b),
            wall_time_ms,
            iterations,
            optimality: optimality.to_string(),
            ties: None,
            explored: None,
            compared_objective: None,
            deviation_percent: None,
        }
    }

    /// Dense per-arc plan reconstructed from the sparse upgrade entries.
    pub fn dense_plan(&self, instance: &Instance) -> Result<Vec<f64>> {
        let mut b = vec![0.0; instance.m()];
        for entry in &self.upgrades {
            if entry.arc >= b.len() {
                bail!("record references arc {} beyond m = {}", entry.arc, b.len());
            }
            b[entry.arc] = entry.amount;
        }
        Ok(b)
    }

    /// Recomputes the objective from the recorded medians and plan; fails if
    /// it drifts from the recorded value by more than [`RECORD_CHECK_TOL`].
    pub fn verify(&self, instance: &Instance, cache: &PathCache) -> Result<()> {
        let b = self.dense_plan(instance)?;
        let recomputed = objective_with_plan(instance, cache, &self.medians, &b)
            .context("re-evaluating recorded medians")?;
        if (recomputed - self.objective).abs() > RECORD_CHECK_TOL {
            bail!(
                "record objective {} does not reproduce (recomputed {})",
                self.objective,
                recomputed
            );
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("record serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("parsing run record JSON")
    }
}
