//! Fastest-path precomputation.
//!
//! For every source j the cache holds, per client i, the time `c1(i, j)` and
//! cost `c2(i, j)` of one canonical fastest path from j to i, plus the
//! predecessor tree the path is recovered from.
//!
//! Path choice is fully deterministic: node labels are (accumulated c1,
//! accumulated c2) ordered lexicographically, so among time-optimal paths the
//! cheapest wins; among relaxations producing identical labels, the
//! predecessor with the smaller node id wins.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::exec;
use crate::instance::Instance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("node {to} unreachable from node {from}; validate the instance first")]
    Unreachable { from: usize, to: usize },
}

/// One single-source run: labels and predecessor tree for source j.
#[derive(Debug, Clone)]
struct SourceRun {
    c1: Vec<f64>,
    c2: Vec<f64>,
    /// `pred[i]` = (previous node, arc id) on the path to node i+1, None at
    /// the source itself.
    pred: Vec<Option<(u32, u32)>>,
}

/// All-sources fastest-path cache. Immutable once computed; cheap to share
/// across worker threads.
#[derive(Debug, Clone)]
pub struct PathCache {
    n: usize,
    runs: Vec<SourceRun>,
}

impl PathCache {
    /// Runs one labeling pass per source node, in parallel when enabled.
    /// Requires a validated (strongly connected) instance.
    pub fn compute(instance: &Instance) -> Result<PathCache, PathError> {
        let n = instance.n;
        let mut adjacency = vec![Vec::new(); n + 1];
        for arc in &instance.arcs {
            adjacency[arc.src].push((arc.dst, arc.id));
        }
        let runs: Vec<Result<SourceRun, PathError>> =
            exec::map_collect(n, |idx| single_source(instance, &adjacency, idx + 1));
        let mut out = Vec::with_capacity(n);
        for run in runs {
            out.push(run?);
        }
        Ok(PathCache { n, runs: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Time of the fastest path from source `j` to client `i`.
    pub fn c1(&self, i: usize, j: usize) -> f64 {
        self.runs[j - 1].c1[i - 1]
    }

    /// Cost along that same path.
    pub fn c2(&self, i: usize, j: usize) -> f64 {
        self.runs[j - 1].c2[i - 1]
    }

    /// Arc ids of the canonical fastest path from `j` to `i`, in travel
    /// order. Empty iff `i == j`.
    pub fn path_arcs(&self, i: usize, j: usize) -> Vec<usize> {
        let mut arcs = Vec::new();
        self.for_each_path_arc(i, j, |id| arcs.push(id));
        arcs.reverse();
        arcs
    }

    /// Visits the path's arc ids walking backwards from `i` to `j`, without
    /// allocating.
    pub(crate) fn for_each_path_arc(&self, i: usize, j: usize, mut f: impl FnMut(usize)) {
        let run = &self.runs[j - 1];
        let mut node = i;
        while let Some((prev, arc)) = run.pred[node - 1] {
            f(arc as usize);
            node = prev as usize;
        }
        debug_assert_eq!(node, j);
    }
}

/// Heap entry ordered so that the lexicographically smallest (c1, c2) label
/// pops first.
struct Entry {
    c1: f64,
    c2: f64,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        other
            .c1
            .total_cmp(&self.c1)
            .then_with(|| other.c2.total_cmp(&self.c2))
            .then_with(|| other.node.cmp(&self.node))
    }
}

fn single_source(
    instance: &Instance,
    adjacency: &[Vec<(usize, usize)>],
    source: usize,
) -> Result<SourceRun, PathError> {
    let n = instance.n;
    let mut c1 = vec![f64::INFINITY; n];
    let mut c2 = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<(u32, u32)>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();

    c1[source - 1] = 0.0;
    c2[source - 1] = 0.0;
    heap.push(Entry { c1: 0.0, c2: 0.0, node: source });

    while let Some(Entry { c1: d1, c2: d2, node }) = heap.pop() {
        if done[node - 1] {
            continue;
        }
        if d1 != c1[node - 1] || d2 != c2[node - 1] {
            continue; // stale entry
        }
        done[node - 1] = true;
        for &(next, arc_id) in &adjacency[node] {
            let arc = &instance.arcs[arc_id];
            let n1 = d1 + arc.c1;
            let n2 = d2 + arc.c2;
            let cur = (c1[next - 1], c2[next - 1]);
            if (n1, n2) < cur {
                c1[next - 1] = n1;
                c2[next - 1] = n2;
                pred[next - 1] = Some((node as u32, arc_id as u32));
                if !done[next - 1] {
                    heap.push(Entry { c1: n1, c2: n2, node: next });
                }
            } else if (n1, n2) == cur {
                // Equal label: keep the smaller predecessor id. Totals are
                // unchanged, only the canonical path identity is.
                if let Some((old_prev, _)) = pred[next - 1] {
                    if (node as u32) < old_prev {
                        pred[next - 1] = Some((node as u32, arc_id as u32));
                    }
                }
            }
        }
    }

    if let Some(idx) = c1.iter().position(|d| !d.is_finite()) {
        return Err(PathError::Unreachable { from: source, to: idx + 1 });
    }
    Ok(SourceRun { c1, c2, pred })
}
