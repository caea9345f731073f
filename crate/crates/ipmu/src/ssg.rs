//! Search-space graph: the digraph over all C(n, p) median sets whose arcs
//! follow the best-improvement local search trajectory.
//!
//! Each set has at most one successor (its best improving swap neighbor), the
//! objective strictly decreases along every arc, and the structure is a
//! forest whose roots are the local optima. Successor selection uses the same
//! tolerance and tie-breaks as the local search, so chasing successors from
//! any set lands exactly where the local search would.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::exec;
use crate::instance::Instance;
use crate::paths::PathCache;
use crate::search::IMPROVEMENT_EPS;
use crate::subsets::{self, binomial, SubsetIndexer};
use crate::upgrade;

/// Default cap on C(n, p) for [`SearchSpaceGraph::build`].
pub const DEFAULT_SSG_LIMIT: u64 = 2_000_000;

const NO_SUCC: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SsgError {
    #[error("C({n}, {p}) = {count} median sets exceeds the limit of {limit}")]
    TooManySubsets { n: usize, p: usize, count: u128, limit: u64 },
}

/// The fully enumerated search space of one instance. Nodes are indexed by
/// the lexicographic rank of their median set.
#[derive(Debug, Clone)]
pub struct SearchSpaceGraph {
    indexer: SubsetIndexer,
    objective: Vec<f64>,
    succ: Vec<u64>,
}

impl SearchSpaceGraph {
    /// Evaluates every p-subset and its swap neighborhood. Refuses when
    /// C(n, p) exceeds `limit`.
    pub fn build(
        instance: &Instance,
        cache: &PathCache,
        limit: u64,
    ) -> Result<SearchSpaceGraph, SsgError> {
        let (n, p) = (instance.n, instance.p);
        let count = binomial(n as u64, p as u64);
        if count > limit as u128 {
            return Err(SsgError::TooManySubsets { n, p, count, limit });
        }
        let total = count as usize;
        let indexer = SubsetIndexer::new(n, p);

        // Both passes walk rank-contiguous blocks so scratch buffers are
        // reused across the sets of a block instead of allocated per set.
        const BLOCK: usize = 256;
        let blocks = total.div_ceil(BLOCK);
        let block_range = |block: usize| (block * BLOCK, (block * BLOCK + BLOCK).min(total));

        let objective: Vec<f64> = exec::map_collect(blocks, |block| {
            let (start, end) = block_range(block);
            let mut set = indexer.unrank(start as u64);
            let mut out = Vec::with_capacity(end - start);
            for rank in start..end {
                if rank > start {
                    subsets::next_combination(&mut set, n);
                }
                out.push(upgrade::objective_of(instance, cache, &set));
            }
            out
        })
        .concat();

        let succ: Vec<u64> = exec::map_collect(blocks, |block| {
            let (start, end) = block_range(block);
            let mut set = indexer.unrank(start as u64);
            let mut member = vec![false; n + 1];
            for &j in &set {
                member[j] = true;
            }
            let mut neighbor = set.clone();
            let mut out = Vec::with_capacity(end - start);
            for rank in start..end {
                if rank > start {
                    for &j in &set {
                        member[j] = false;
                    }
                    subsets::next_combination(&mut set, n);
                    for &j in &set {
                        member[j] = true;
                    }
                }
                // best neighbor by (objective, removed id, added id)
                let mut best: Option<(f64, usize, usize, u64)> = None;
                for (slot, &removed) in set.iter().enumerate() {
                    for added in 1..=n {
                        if member[added] {
                            continue;
                        }
                        neighbor.copy_from_slice(&set);
                        neighbor[slot] = added;
                        neighbor.sort_unstable();
                        let r = indexer.rank(&neighbor);
                        let value = objective[r as usize];
                        let key = (value, removed, added);
                        if best.is_none_or(|(bv, br, ba, _)| key < (bv, br, ba)) {
                            best = Some((value, removed, added, r));
                        }
                    }
                }
                out.push(match best {
                    Some((value, _, _, r)) if value < objective[rank] - IMPROVEMENT_EPS => r,
                    _ => NO_SUCC,
                });
            }
            out
        })
        .concat();

        Ok(SearchSpaceGraph { indexer, objective, succ })
    }

    pub fn node_count(&self) -> u64 {
        self.objective.len() as u64
    }

    /// node count minus the number of local optima
    pub fn edge_count(&self) -> u64 {
        self.succ.iter().filter(|&&s| s != NO_SUCC).count() as u64
    }

    /// The median set at a rank.
    pub fn set_of(&self, rank: u64) -> Vec<usize> {
        self.indexer.unrank(rank)
    }

    /// Rank of a median set (sorted ascending).
    pub fn rank_of(&self, set: &[usize]) -> u64 {
        self.indexer.rank(set)
    }

    pub fn objective(&self, rank: u64) -> f64 {
        self.objective[rank as usize]
    }

    /// Best-improvement successor, None at a local optimum.
    pub fn successor(&self, rank: u64) -> Option<u64> {
        match self.succ[rank as usize] {
            NO_SUCC => None,
            s => Some(s),
        }
    }

    /// Follows successors to the local optimum at the bottom of this basin.
    pub fn chase(&self, mut rank: u64) -> u64 {
        while let Some(next) = self.successor(rank) {
            rank = next;
        }
        rank
    }

    /// Forest decomposition: one entry per local optimum with its basin size.
    pub fn stats(&self) -> SsgStats {
        let total = self.objective.len();
        // memoized root per node
        let mut root = vec![NO_SUCC; total];
        let mut stack = Vec::new();
        for start in 0..total {
            if root[start] != NO_SUCC {
                continue;
            }
            let mut rank = start;
            loop {
                if root[rank] != NO_SUCC {
                    break;
                }
                match self.successor(rank as u64) {
                    Some(next) => {
                        stack.push(rank);
                        rank = next as usize;
                    }
                    None => {
                        root[rank] = rank as u64;
                        break;
                    }
                }
            }
            let r = root[rank];
            while let Some(node) = stack.pop() {
                root[node] = r;
            }
        }

        let mut basin: HashMap<u64, u64> = HashMap::new();
        for &r in &root {
            *basin.entry(r).or_insert(0) += 1;
        }
        let mut optima: Vec<LocalOptimum> = basin
            .into_iter()
            .map(|(rank, size)| LocalOptimum {
                rank,
                medians: self.set_of(rank),
                objective: self.objective(rank),
                basin_size: size,
            })
            .collect();
        optima.sort_by(|a, b| a.objective.total_cmp(&b.objective).then(a.rank.cmp(&b.rank)));

        let global = &optima[0];
        SsgStats {
            node_count: total as u64,
            global_value: global.objective,
            global_basin_share: global.basin_size as f64 / total as f64,
            local_optima: optima,
        }
    }

    /// DOT rendering: node labels are objective values, local optima are
    /// drawn with double periphery. Basins larger than
    /// `options.collapse_threshold` are folded into a single summary node.
    pub fn to_dot(&self, options: &DotOptions) -> String {
        let stats = self.stats();
        let mut out = String::from("digraph search_space {\n  rankdir=BT;\n  node [shape=circle, fontsize=10];\n");
        match options.collapse_threshold {
            Some(threshold) => {
                // roots always drawn; big basins become one summary node
                let mut root_of = HashMap::new();
                for opt in &stats.local_optima {
                    root_of.insert(opt.rank, opt);
                }
                for opt in &stats.local_optima {
                    let _ = writeln!(
                        out,
                        "  n{} [label=\"{}\", peripheries=2];",
                        opt.rank, opt.objective
                    );
                    if opt.basin_size > threshold {
                        let _ = writeln!(
                            out,
                            "  b{} [label=\"{} sets\", shape=box];\n  b{} -> n{};",
                            opt.rank,
                            opt.basin_size - 1,
                            opt.rank,
                            opt.rank
                        );
                    }
                }
                for rank in 0..self.node_count() {
                    let root = self.chase(rank);
                    if root_of[&root].basin_size > threshold {
                        continue; // folded into the summary node
                    }
                    if let Some(next) = self.successor(rank) {
                        let _ = writeln!(out, "  n{} [label=\"{}\"];", rank, self.objective(rank));
                        let _ = writeln!(out, "  n{rank} -> n{next};");
                    }
                }
            }
            None => {
                for rank in 0..self.node_count() {
                    let peripheries = if self.successor(rank).is_none() { 2 } else { 1 };
                    let _ = writeln!(
                        out,
                        "  n{} [label=\"{}\", peripheries={}];",
                        rank,
                        self.objective(rank),
                        peripheries
                    );
                }
                for rank in 0..self.node_count() {
                    if let Some(next) = self.successor(rank) {
                        let _ = writeln!(out, "  n{rank} -> n{next};");
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// One local optimum and the tree of sets draining to it.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOptimum {
    pub rank: u64,
    pub medians: Vec<usize>,
    pub objective: f64,
    pub basin_size: u64,
}

/// Forest-level summary of a built search space graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SsgStats {
    pub node_count: u64,
    /// Sorted by objective ascending (global optimum first), then rank.
    pub local_optima: Vec<LocalOptimum>,
    pub global_value: f64,
    /// Fraction of all sets whose trajectory ends at the global optimum.
    pub global_basin_share: f64,
}

impl SsgStats {
    pub fn local_optima_count(&self) -> usize {
        self.local_optima.len()
    }

    /// CSV table, one row per local optimum: rank (1 = global optimum),
    /// objective, basin size.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,objective,basin_size\n");
        for (idx, opt) in self.local_optima.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", idx + 1, opt.objective, opt.basin_size);
        }
        out
    }
}

/// Options for [`SearchSpaceGraph::to_dot`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DotOptions {
    /// Fold basins with more than this many sets into a summary node.
    pub collapse_threshold: Option<u64>,
}
