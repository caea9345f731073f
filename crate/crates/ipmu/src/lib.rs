//! Solver toolkit for the induced p-median problem with arc upgrades.
//!
//! The problem: on a directed graph where every arc carries both a traversal
//! time and a transport cost, pick `p` median nodes and split an upgrade
//! budget across arcs (each reduction capped per arc) so that the total
//! demand-weighted cost of serving every node from its time-closest median
//! is minimized. Clients always travel along time-fastest paths; the budget
//! only discounts the cost metric.
//!
//! Module map:
//! - [`instance`]: problem data, text format, validation, random generation.
//! - [`paths`]: all-sources fastest-path cache with deterministic
//!   tie-breaking.
//! - [`upgrade`]: assignment, per-arc upgrade weights, the greedy knapsack
//!   budget split, and solution evaluation.
//! - [`search`]: the Kuehn-Hamburger baseline, GRASP construction, swap
//!   local search, and the multi-start GRASP loop.
//! - [`oracle`]: exhaustive enumeration and an LP-vertex knapsack check for
//!   desk-scale certification.
//! - [`ssg`]: full search-space-graph enumeration for instance hardness
//!   analysis.
//!
//! Built with data-parallel inner loops on rayon (feature `parallel`, on by
//! default); disabling the feature yields a sequential build with bit-wise
//! identical results.

pub mod instance;
pub mod oracle;
pub mod paths;
pub mod search;
pub mod ssg;
pub mod upgrade;

mod exec;
mod subsets;

pub use exec::{effective_parallelism, set_thread_count};
